// Command-line front end. One subcommand per pipeline; data goes to the
// output stream or file, diagnostics to the error stream. Exit status:
// 0 success, 1 domain error, 2 usage error.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace magsling::cli {

/// Run the CLI with `args` (no program name). File outputs are written
/// atomically; identical inputs produce byte-identical outputs.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace magsling::cli

// Small text/file helpers: locale-free number formatting and parsing,
// CSV field splitting, atomic file writes.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace magsling::io {

/// Shortest round-trip decimal representation of a double (std::to_chars).
std::string format_double(double v);

/// Strict double parse of an entire field. Throws ParseError on failure.
double parse_double(std::string_view field, const std::string& context);

/// Split one CSV/whitespace line. `delim` is ',' for CSV, ' ' collapses runs.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

std::string_view trim(std::string_view s);

/// Write `content` to `path` atomically: temp file in the same directory,
/// then rename over the target.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace magsling::io

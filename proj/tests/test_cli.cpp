#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "magsling/cli.hpp"
#include "magsling/grids.hpp"
#include "magsling/io_util.hpp"

#include "test_helpers.hpp"

using magsling::cli::run;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

const std::string kData = MAGSLING_DATA_DIR;

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("dynamics: default calibration yields a complete JSON report") {
    const RunResult r = cli({"dynamics"});
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    for (const char* key :
         {"centrifugal_N", "rope_angle_rad", "rope_angle_deg", "drag_N", "net_force_N",
          "natural_freq_radps", "rope_damping_Nspm", "amplitude_m", "eff_damping",
          "settling_s", "final_amplitude_m"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["amplitude_m"].get<double>() > 0.0);
}

TEST_CASE("dynamics: zero speed warns about the static regime") {
    const RunResult r = cli({"dynamics", "--speed", "0"});
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("out of model regime") != std::string::npos);
}

TEST_CASE("sweep then select-length reproduces the 10 m choice end to end") {
    testutil::TempDir tmp("cli_select");
    const std::string sweep_path = tmp.file("sweep.csv").string();
    const RunResult sweep = cli({"sweep", "-o", sweep_path});
    REQUIRE(sweep.exit_code == 0);

    const RunResult sel = cli({"select-length", "--noise", kData + "/fig4_noise.csv",
                               "--sweep", sweep_path});
    REQUIRE(sel.exit_code == 0);
    const json j = json::parse(sel.out);
    CHECK(j["selected_length_m"].get<double>() == 10.0);
    CHECK(j["model"]["exponent_p"].get<double>() < -2.0);
    CHECK(j["table"].size() == 5);
}

TEST_CASE("sweep: noise samples add the predicted-noise column") {
    const RunResult r = cli({"sweep", "--noise", kData + "/fig4_noise.csv"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("length_m,amplitude_m,settling_s,noise_nT\n", 0) == 0);
}

TEST_CASE("simulate --measure reports amplitude and settling") {
    const RunResult r = cli({"simulate", "--length", "9", "--zeta", "0.15", "--speed", "8",
                             "--radius", "9"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("t_s,theta_rad,offset_m\n", 0) == 0);

    const RunResult m = cli({"simulate", "--length", "9", "--zeta", "0.15", "--speed", "8",
                             "--radius", "9", "--measure"});
    REQUIRE(m.exit_code == 0);
    const json j = json::parse(m.out);
    CHECK(j["amplitude_m"].get<double>() > 0.0);
    CHECK(j["settling_s"].get<double>() > 0.0);
}

TEST_CASE("emi-fit emits the fitted model") {
    const RunResult r = cli({"emi-fit", "--samples", kData + "/fig4_noise.csv"});
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["model"]["exponent_p"].get<double>() == doctest::Approx(-2.6647).epsilon(1e-3));
    CHECK(j["samples_used"] == 5);
}

TEST_CASE("economics --paper-defaults flags the VTOL row on cost per km") {
    const RunResult table = cli({"economics", "--paper-defaults"});
    REQUIRE(table.exit_code == 0);
    CHECK(table.out.find("0.78 *") != std::string::npos);

    const RunResult csv = cli({"economics", "--paper-defaults", "--format", "csv"});
    REQUIRE(csv.exit_code == 0);
    bool vtol_flagged = false;
    std::istringstream lines(csv.out);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("VTOL", 0) == 0) {
            vtol_flagged = line.find("cost_per_line_km") != std::string::npos;
        }
    }
    CHECK(vtol_flagged);
}

TEST_CASE("grid-compare ratio of a grid with itself is identically one") {
    testutil::TempDir tmp("cli_ratio");
    const std::string out_grid = tmp.file("ratio.grid").string();
    const RunResult r = cli({"grid-compare", "--mode", "ratio",
                             kData + "/demo_drone.grid", kData + "/demo_drone.grid", "-o",
                             out_grid});
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.out);
    CHECK(report["signal_ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

    std::ifstream f(out_grid);
    const magsling::grids::MagGrid g = magsling::grids::parse_grid(f);
    for (std::size_t row = 0; row < g.n_rows(); ++row)
        for (std::size_t col = 0; col < g.n_cols(); ++col)
            if (g.is_valid(row, col)) CHECK(g.at(row, col) == 1.0);
}

TEST_CASE("grid-compare can resample both inputs before comparing") {
    testutil::TempDir tmp("cli_resample");
    const std::string out_grid = tmp.file("r.grid").string();
    const RunResult r = cli({"grid-compare", "--mode", "ratio", "--resample-to", "50",
                             kData + "/demo_drone.grid", kData + "/demo_fixedwing.grid",
                             "-o", out_grid});
    REQUIRE(r.exit_code == 0);
    std::ifstream f(out_grid);
    const magsling::grids::MagGrid g = magsling::grids::parse_grid(f);
    CHECK(g.cell_size_m() == 50.0);
    CHECK(g.n_cols() == 10);
    CHECK(g.n_rows() == 14);
}

TEST_CASE("grid-compare subtract reports the applied offset") {
    const RunResult r = cli({"grid-compare", "--mode", "subtract",
                             kData + "/demo_drone.grid", kData + "/demo_fixedwing.grid"});
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.err); // grid itself goes to stdout
    CHECK(report["offset_nT"].get<double>() > 0.0);
    CHECK(r.out.rfind("# ncols", 0) == 0);
}

TEST_CASE("profile runs over the bundled demo grids") {
    const RunResult r = cli({"profile", "--grid-a", kData + "/demo_drone.grid", "--grid-b",
                             kData + "/demo_fixedwing.grid", "--elevation",
                             kData + "/demo_elevation.grid", "--line",
                             "682050,4966450;682400,4965900", "--step-m", "50"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("chainage_m,tmi_a_nT,tmi_b_nT,elevation_m,difference_nT\n", 0) == 0);
    const json report = json::parse(r.err);
    CHECK(report["difference_elevation_r"].get<double>() < -0.9);
}

TEST_CASE("grid-stats emits a single CSV row") {
    const RunResult r = cli({"grid-stats", kData + "/demo_drone.grid"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("mean_nT,median_nT,mode_nT,stddev_nT,min_nT,max_nT,valid_cell_count\n",
                      0) == 0);

    const RunResult j = cli({"grid-stats", kData + "/demo_drone.grid", "--format", "json"});
    REQUIRE(j.exit_code == 0);
    const json stats = json::parse(j.out);
    CHECK(stats["valid_cell_count"] == 557); // three demo cells are no-data
    CHECK(stats["min_nT"].get<double>() <= stats["median_nT"].get<double>());
    CHECK(stats["median_nT"].get<double>() <= stats["max_nT"].get<double>());
}

TEST_CASE("economics --format json lists per-platform best metrics") {
    const RunResult r = cli({"economics", "--paper-defaults", "--format", "json"});
    REQUIRE(r.exit_code == 0);
    const json rows = json::parse(r.out);
    REQUIRE(rows.size() == 4);
    bool vtol_best_cost = false;
    for (const auto& row : rows) {
        if (row["name"].get<std::string>().rfind("VTOL", 0) == 0) {
            for (const auto& flag : row["best"]) {
                if (flag == "cost_per_line_km") vtol_best_cost = true;
            }
        }
    }
    CHECK(vtol_best_cost);
}

TEST_CASE("grid-compare --no-offset leaves the raw difference") {
    const RunResult lifted = cli({"grid-compare", "--mode", "subtract",
                                  kData + "/demo_fixedwing.grid", kData + "/demo_drone.grid"});
    const RunResult raw = cli({"grid-compare", "--mode", "subtract", "--no-offset",
                               kData + "/demo_fixedwing.grid", kData + "/demo_drone.grid"});
    REQUIRE(lifted.exit_code == 0);
    REQUIRE(raw.exit_code == 0);
    CHECK(json::parse(lifted.err)["offset_nT"].get<double>() > 0.0);
    CHECK(json::parse(raw.err)["offset_nT"].get<double>() == 0.0);
}

TEST_CASE("calibration files can supply the tether length") {
    testutil::TempDir tmp("cli_calib");
    const auto path = tmp.file("calib.json");
    testutil::write_text(path, R"({
      "name": "short-rope", "mass_kg": 3.0, "drag_coeff": 0.0,
      "cross_section_m2": 0.05, "speed_mps": 10.55, "turn_radius_m": 7.81,
      "damping_ratio": 0.9999, "a_final_fraction": 0.0094, "length_m": 5.0
    })");
    const RunResult r = cli({"dynamics", "--calibration", path.string()});
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["length_m"].get<double>() == 5.0);
}

TEST_CASE("exit codes: usage errors are 2, domain errors are 1") {
    CHECK(cli({"no-such-command"}).exit_code == 2);
    CHECK(cli({"sweep", "--bogus-flag"}).exit_code == 2);
    CHECK(cli({}).exit_code == 2);

    // domain error from a module, surfaced with its prefix
    const RunResult r = cli({"select-length", "--noise", kData + "/fig4_noise.csv",
                             "--sweep", kData + "/fig4_sweep.csv", "--noise-threshold",
                             "0.01"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("emi:") != std::string::npos);

    // an input path that does not exist violates the command contract
    CHECK(cli({"grid-stats", "/nonexistent/file.grid"}).exit_code == 2);
}

TEST_CASE("module error paths surface through the CLI with exit code 1") {
    testutil::TempDir tmp("cli_errors");

    // registration mismatch between two valid grids
    const auto small = tmp.file("small.grid");
    testutil::write_text(small, "# ncols 2\n# nrows 2\n# origin_easting_m 0\n"
                                "# origin_northing_m 0\n# cell_size_m 5\n# nodata -99999\n"
                                "# units nT\n1 2\n3 4\n");
    const RunResult reg = cli({"grid-compare", "--mode", "ratio",
                               kData + "/demo_drone.grid", small.string()});
    CHECK(reg.exit_code == 1);
    CHECK(reg.err.find("grids:") != std::string::npos);

    // malformed grid file: parse error with a line number
    const auto broken = tmp.file("broken.grid");
    testutil::write_text(broken, "# ncols 2\n# nrows 2\n# origin_easting_m 0\n"
                                 "# origin_northing_m 0\n# cell_size_m 5\n# nodata -99999\n"
                                 "# units nT\n1 2\n3 oops\n");
    const RunResult parse = cli({"grid-stats", broken.string()});
    CHECK(parse.exit_code == 1);
    CHECK(parse.err.find("line 9") != std::string::npos);

    // profile vertex outside the grids
    const RunResult extent = cli({"profile", "--grid-a", kData + "/demo_drone.grid",
                                  "--grid-b", kData + "/demo_fixedwing.grid", "--elevation",
                                  kData + "/demo_elevation.grid", "--line",
                                  "0,0;682400,4965900", "--step-m", "50"});
    CHECK(extent.exit_code == 1);
    CHECK(extent.err.find("vertex 0") != std::string::npos);

    // integrator invariant violation via a too-coarse step
    const RunResult coarse = cli({"simulate", "--length", "10", "--dt", "5"});
    CHECK(coarse.exit_code == 1);
    CHECK(coarse.err.find("simulate:") != std::string::npos);

    // platform JSON that does not validate
    const auto bad_json = tmp.file("bad_platforms.json");
    testutil::write_text(bad_json, "[{\"name\": \"X\"}]");
    CHECK(cli({"economics", "--platforms", bad_json.string()}).exit_code == 1);
}

TEST_CASE("output files are written atomically and match stdout byte for byte") {
    testutil::TempDir tmp("cli_atomic");
    const std::string path = tmp.file("sweep.csv").string();
    const RunResult direct = cli({"sweep"});
    const RunResult to_file = cli({"sweep", "-o", path});
    REQUIRE(direct.exit_code == 0);
    REQUIRE(to_file.exit_code == 0);
    CHECK(magsling::io::read_file(path) == direct.out);
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_SUITE_END();

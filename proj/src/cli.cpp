#include "magsling/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "magsling/calibration.hpp"
#include "magsling/dynamics.hpp"
#include "magsling/economics.hpp"
#include "magsling/emi.hpp"
#include "magsling/errors.hpp"
#include "magsling/grids.hpp"
#include "magsling/io_util.hpp"
#include "magsling/simulate.hpp"

namespace magsling::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Emit a finished product either to the -o path (atomically) or to `out`.
void deliver(const std::string& content, const std::string& output_path, std::ostream& out) {
    if (output_path.empty()) {
        out << content;
    } else {
        io::atomic_write_file(output_path, content);
    }
}

// --- shared model-parameter options -------------------------------------

struct ModelOptions {
    std::string calibration_path;
    std::optional<double> mass, cd, area, length, zeta, speed, radius, rho, gravity, band;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
    cmd->add_option("--calibration", o.calibration_path,
                    "Calibration JSON (defaults to the built-in fig4-calibration)")
        ->check(CLI::ExistingFile);
    auto opt = [&](const char* name, std::optional<double>& slot, const char* desc) {
        cmd->add_option(name, slot, desc);
    };
    opt("--mass", o.mass, "Payload mass [kg]");
    opt("--cd", o.cd, "Payload drag coefficient");
    opt("--area", o.area, "Payload cross section [m^2]");
    opt("--length", o.length, "Tether length [m]");
    opt("--zeta", o.zeta, "Tether damping ratio");
    opt("--speed", o.speed, "Flight speed [m/s]");
    opt("--radius", o.radius, "Turn radius [m]");
    opt("--rho", o.rho, "Air density [kg/m^3]");
    opt("--g", o.gravity, "Gravity [m/s^2]");
    opt("--a-final-fraction", o.band, "Settle band as a fraction of amplitude");
}

struct ResolvedModel {
    dynamics::PayloadSpec payload;
    dynamics::FlightCondition flight;
    double damping_ratio;
    double a_final_fraction;
    double length_m;
};

ResolvedModel resolve_model(const ModelOptions& o) {
    dynamics::Calibration c = o.calibration_path.empty()
                                  ? dynamics::builtin_fig4_calibration()
                                  : dynamics::load_calibration(o.calibration_path);
    ResolvedModel m;
    m.payload = c.payload;
    m.flight = c.flight;
    m.damping_ratio = c.damping_ratio;
    m.a_final_fraction = c.a_final_fraction;
    m.length_m = c.length_m.value_or(10.0);
    if (o.mass) m.payload.mass_kg = *o.mass;
    if (o.cd) m.payload.drag_coeff = *o.cd;
    if (o.area) m.payload.cross_section_m2 = *o.area;
    if (o.length) m.length_m = *o.length;
    if (o.zeta) m.damping_ratio = *o.zeta;
    if (o.speed) m.flight.speed_mps = *o.speed;
    if (o.radius) m.flight.turn_radius_m = *o.radius;
    if (o.rho) m.flight.air_density_kgm3 = *o.rho;
    if (o.gravity) m.flight.gravity_mps2 = *o.gravity;
    if (o.band) m.a_final_fraction = *o.band;
    return m;
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    for (const auto field : io::split_fields(csv, ',')) {
        out.push_back(io::parse_double(field, what));
    }
    return out;
}

std::vector<emi::NoiseSample> load_noise_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    return emi::read_noise_csv(in);
}

std::vector<dynamics::SweepRow> load_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::vector<dynamics::SweepRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = io::trim(line);
        if (trimmed.empty()) continue;
        const auto fields = io::split_fields(trimmed, ',');
        if (!header_seen) {
            header_seen = true;
            if (fields.size() < 3 || io::trim(fields[0]) != "length_m" ||
                io::trim(fields[1]) != "amplitude_m" || io::trim(fields[2]) != "settling_s") {
                throw ParseError(path + ": expected header starting "
                                        "'length_m,amplitude_m,settling_s'");
            }
            continue;
        }
        if (fields.size() < 3) {
            throw ParseError(path + " line " + std::to_string(line_no) +
                             ": expected 3+ fields");
        }
        const std::string ctx = path + " line " + std::to_string(line_no);
        rows.push_back({io::parse_double(fields[0], ctx), io::parse_double(fields[1], ctx),
                        io::parse_double(fields[2], ctx)});
    }
    if (rows.empty()) throw ParseError(path + ": no sweep rows");
    return rows;
}

grids::MagGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    try {
        return grids::parse_grid(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

json model_json(const emi::EmiModel& m) {
    return json{{"coefficient_k", m.coefficient_k},
                {"exponent_p", m.exponent_p},
                {"fit_residual_rms", m.fit_residual_rms}};
}

// --- subcommand bodies ----------------------------------------------------

int run_dynamics(const ModelOptions& mo, const std::string& output, std::ostream& out,
                 std::ostream& err) {
    const ResolvedModel m = resolve_model(mo);
    if (m.flight.speed_mps == 0.0) {
        err << "dynamics: warning: speed is zero; static hanging case, amplitude degenerates "
               "to the tether length (out of model regime)\n";
    }
    const dynamics::SwingPrediction p = dynamics::predict(
        m.payload, {m.length_m, m.damping_ratio}, m.flight, m.a_final_fraction);
    json j;
    j["length_m"] = m.length_m;
    j["centrifugal_N"] = p.centrifugal_N;
    j["rope_angle_rad"] = p.rope_angle_rad;
    j["rope_angle_deg"] = p.rope_angle_rad * 180.0 / std::numbers::pi;
    j["drag_N"] = p.drag_N;
    j["net_force_N"] = p.net_force_N;
    j["natural_freq_radps"] = p.natural_freq_radps;
    j["rope_damping_Nspm"] = p.rope_damping_Nspm;
    j["amplitude_m"] = p.amplitude_m;
    j["eff_damping"] = p.eff_damping;
    j["settling_s"] = p.settling_s;
    j["final_amplitude_m"] = p.final_amplitude_m;
    deliver(j.dump(2) + "\n", output, out);
    return kExitOk;
}

int run_sweep(const ModelOptions& mo, const std::string& lengths_csv,
              const std::string& noise_path, std::optional<double> fixed_exponent,
              const std::string& output, std::ostream& out) {
    const ResolvedModel m = resolve_model(mo);
    const std::vector<double> lengths = parse_number_list(lengths_csv, "--lengths");
    const auto rows =
        dynamics::length_sweep(m.payload, m.flight, m.damping_ratio, lengths,
                               m.a_final_fraction);

    std::optional<emi::EmiModel> noise_model;
    if (!noise_path.empty()) {
        const auto samples = load_noise_csv(noise_path);
        noise_model = emi::fit_noise_model(samples, fixed_exponent).model;
    }

    std::ostringstream csv;
    csv << (noise_model ? "length_m,amplitude_m,settling_s,noise_nT\n"
                        : "length_m,amplitude_m,settling_s\n");
    for (const auto& row : rows) {
        csv << io::format_double(row.length_m) << ',' << io::format_double(row.amplitude_m)
            << ',' << io::format_double(row.settling_s);
        if (noise_model) {
            csv << ',' << io::format_double(emi::predict_noise(*noise_model, row.length_m));
        }
        csv << '\n';
    }
    deliver(csv.str(), output, out);
    return kExitOk;
}

int run_simulate(const ModelOptions& mo, std::optional<double> dt, std::optional<double> dur,
                 double initial_angle, bool measure, const std::string& output,
                 std::ostream& out) {
    const ResolvedModel m = resolve_model(mo);
    simulate::SimConfig cfg;
    cfg.payload = m.payload;
    cfg.tether = {m.length_m, m.damping_ratio};
    cfg.flight = m.flight;
    cfg.settle_band_fraction = m.a_final_fraction;
    cfg.initial_angle_rad = initial_angle;
    const double period = simulate::natural_period_s(cfg.tether, cfg.flight.gravity_mps2);
    cfg.time_step_s = dt ? *dt : period / 200.0;
    if (dur) {
        cfg.duration_s = *dur;
    } else {
        // long enough to watch the swing settle
        const double zeta = std::max(cfg.tether.damping_ratio, 0.02);
        const double settle_guess = std::log(1.0 / cfg.settle_band_fraction) /
                                    (zeta * std::sqrt(cfg.flight.gravity_mps2 /
                                                      cfg.tether.length_m));
        cfg.duration_s = std::max(10.0 * period, 1.5 * settle_guess + 6.0 * period);
    }

    const simulate::Trajectory traj = simulate::simulate_pendulum(cfg);
    if (measure) {
        const auto meas =
            simulate::measure_amplitude_settling(traj, cfg.settle_band_fraction);
        json j;
        j["amplitude_m"] = meas.amplitude_m;
        j["settling_s"] = meas.settling_s;
        j["forcing_end_s"] = traj.forcing_end_s;
        j["time_step_s"] = cfg.time_step_s;
        j["duration_s"] = cfg.duration_s;
        deliver(j.dump(2) + "\n", output, out);
        return kExitOk;
    }
    std::ostringstream csv;
    csv << "t_s,theta_rad,offset_m\n";
    for (std::size_t i = 0; i < traj.times_s.size(); ++i) {
        csv << io::format_double(traj.times_s[i]) << ','
            << io::format_double(traj.swing_angle_rad[i]) << ','
            << io::format_double(traj.bob_offset_m[i]) << '\n';
    }
    deliver(csv.str(), output, out);
    return kExitOk;
}

int run_emi_fit(const std::string& samples_path, std::optional<double> fixed_exponent,
                const std::string& output, std::ostream& out) {
    const auto samples = load_noise_csv(samples_path);
    const emi::FitReport report = emi::fit_noise_model(samples, fixed_exponent);
    json j;
    j["model"] = model_json(report.model);
    j["samples_used"] = report.samples_used;
    j["excluded_zero_noise"] = report.excluded_zero_noise;
    if (fixed_exponent) {
        // show how the pinned exponent compares against letting the data speak
        const emi::FitReport free_fit = emi::fit_noise_model(samples);
        j["free_fit"] = model_json(free_fit.model);
    }
    deliver(j.dump(2) + "\n", output, out);
    return kExitOk;
}

int run_select_length(const std::string& noise_path, const std::string& sweep_path,
                      double threshold, const std::string& policy_name,
                      const std::string& weights_csv, const std::string& output,
                      std::ostream& out) {
    const auto samples = load_noise_csv(noise_path);
    const auto sweep = load_sweep_csv(sweep_path);
    const emi::EmiModel model = emi::fit_noise_model(samples).model;

    emi::SelectionPolicy policy;
    policy.noise_threshold_nT = threshold;
    if (policy_name == "weighted") {
        policy.kind = emi::PolicyKind::Weighted;
        const auto w = parse_number_list(weights_csv, "--weights");
        if (w.size() != 3) throw DomainError("select-length: --weights needs w1,w2,w3");
        policy.weights = {w[0], w[1], w[2]};
    }

    const emi::SelectionReport report = emi::select_tether_length(sweep, model, policy);
    json j;
    j["selected_length_m"] = report.selected_length_m;
    j["policy"] = policy_name;
    if (policy.kind == emi::PolicyKind::Threshold) {
        j["noise_threshold_nT"] = policy.noise_threshold_nT;
    } else {
        j["weights"] = {policy.weights[0], policy.weights[1], policy.weights[2]};
    }
    j["model"] = model_json(report.model);
    json table = json::array();
    for (const auto& row : report.table) {
        table.push_back({{"length_m", row.length_m},
                         {"amplitude_m", row.amplitude_m},
                         {"settling_s", row.settling_s},
                         {"noise_nT", row.noise_nT}});
    }
    j["table"] = table;
    deliver(j.dump(2) + "\n", output, out);
    return kExitOk;
}

std::string money(double usd) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    ss << usd;
    return ss.str();
}

std::string fixed1(double v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(1);
    ss << v;
    return ss.str();
}

int run_economics(bool paper_defaults, const std::string& platforms_path,
                  const std::string& format, const std::string& output, std::ostream& out) {
    std::vector<economics::PlatformSpec> platforms;
    if (paper_defaults) {
        platforms = economics::default_platforms();
    } else if (!platforms_path.empty()) {
        platforms = economics::load_platforms(platforms_path);
    } else {
        throw DomainError("economics: choose --paper-defaults or --platforms FILE");
    }
    const auto rows = economics::compare_platforms(platforms);

    std::ostringstream body;
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json j;
            j["name"] = r.platform.name;
            j["flights_per_day"] = r.metrics.flights_per_day;
            j["ops_cost_per_flight_usd"] = r.metrics.ops_cost_per_flight_usd;
            j["distance_per_flight_km"] = r.metrics.distance_per_flight_km;
            j["cost_per_line_km_usd"] = r.metrics.cost_per_line_km_usd;
            j["coverage_area_km2"] = r.metrics.coverage_area_km2;
            j["flight_time_per_km_s"] = r.metrics.flight_time_per_km_s;
            json best = json::array();
            if (r.best.aircraft_cost) best.push_back("aircraft_cost");
            if (r.best.flight_duration) best.push_back("flight_duration");
            if (r.best.safety) best.push_back("safety");
            if (r.best.coverage_area) best.push_back("coverage_area");
            if (r.best.line_spacing) best.push_back("line_spacing");
            if (r.best.cost_per_line_km) best.push_back("cost_per_line_km");
            if (r.best.flight_time_per_km) best.push_back("flight_time_per_km");
            if (r.best.daily_ops_cost) best.push_back("daily_ops_cost");
            j["best"] = best;
            arr.push_back(j);
        }
        body << arr.dump(2) << "\n";
    } else if (format == "csv") {
        body << "name,flights_per_day,ops_cost_per_flight_usd,distance_per_flight_km,"
                "cost_per_line_km_usd,coverage_area_km2,flight_time_per_km_s,best\n";
        for (const auto& r : rows) {
            std::vector<std::string> best;
            if (r.best.aircraft_cost) best.push_back("aircraft_cost");
            if (r.best.flight_duration) best.push_back("flight_duration");
            if (r.best.safety) best.push_back("safety");
            if (r.best.coverage_area) best.push_back("coverage_area");
            if (r.best.line_spacing) best.push_back("line_spacing");
            if (r.best.cost_per_line_km) best.push_back("cost_per_line_km");
            if (r.best.flight_time_per_km) best.push_back("flight_time_per_km");
            if (r.best.daily_ops_cost) best.push_back("daily_ops_cost");
            std::string joined;
            for (std::size_t i = 0; i < best.size(); ++i) {
                if (i) joined += ';';
                joined += best[i];
            }
            body << r.platform.name << ',' << io::format_double(r.metrics.flights_per_day)
                 << ',' << io::format_double(r.metrics.ops_cost_per_flight_usd) << ','
                 << io::format_double(r.metrics.distance_per_flight_km) << ','
                 << io::format_double(r.metrics.cost_per_line_km_usd) << ','
                 << io::format_double(r.metrics.coverage_area_km2) << ','
                 << io::format_double(r.metrics.flight_time_per_km_s) << ',' << joined << '\n';
        }
    } else { // aligned text table, metrics as rows, '*' marks the favorable value
        std::vector<std::string> headers{"Metric"};
        for (const auto& r : rows) headers.push_back(r.platform.name);
        std::vector<std::vector<std::string>> table;
        auto add_row = [&](const std::string& label, auto cell) {
            std::vector<std::string> row{label};
            for (const auto& r : rows) row.push_back(cell(r));
            table.push_back(std::move(row));
        };
        add_row("Cost of Aircraft ($)", [](const auto& r) {
            return money(r.platform.aircraft_cost_usd) + (r.best.aircraft_cost ? " *" : "");
        });
        add_row("Flight Duration (h)", [](const auto& r) {
            return fixed1(r.platform.flight_duration_h) + (r.best.flight_duration ? " *" : "");
        });
        add_row("Safety (1-10)", [](const auto& r) {
            return std::to_string(r.platform.safety_score) + (r.best.safety ? " *" : "");
        });
        add_row("Coverage Area per Flight (km2)", [](const auto& r) {
            return fixed1(r.metrics.coverage_area_km2) + (r.best.coverage_area ? " *" : "");
        });
        add_row("Typical Line Spacing (m)", [](const auto& r) {
            return fixed1(r.platform.line_spacing_m) + (r.best.line_spacing ? " *" : "");
        });
        add_row("Flights per Day", [](const auto& r) {
            return fixed1(r.metrics.flights_per_day);
        });
        add_row("Distance per Flight (km)", [](const auto& r) {
            return fixed1(r.metrics.distance_per_flight_km);
        });
        add_row("Cost per Line Km ($/km)", [](const auto& r) {
            return money(r.metrics.cost_per_line_km_usd) +
                   (r.best.cost_per_line_km ? " *" : "");
        });
        add_row("Flight Time per km (s/km)", [](const auto& r) {
            return fixed1(r.metrics.flight_time_per_km_s) +
                   (r.best.flight_time_per_km ? " *" : "");
        });
        add_row("Operating Costs ($/day)", [](const auto& r) {
            return money(r.platform.daily_ops_cost_usd) + (r.best.daily_ops_cost ? " *" : "");
        });

        std::vector<std::size_t> width(headers.size());
        for (std::size_t c = 0; c < headers.size(); ++c) {
            width[c] = headers[c].size();
            for (const auto& row : table) width[c] = std::max(width[c], row[c].size());
        }
        auto emit_row = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                body << row[c] << std::string(width[c] - row[c].size(), ' ');
                body << (c + 1 < row.size() ? "  " : "");
            }
            body << '\n';
        };
        emit_row(headers);
        std::size_t total = 0;
        for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
        body << std::string(total, '-') << '\n';
        for (const auto& row : table) emit_row(row);
        body << "(* = favorable value per metric)\n";
    }
    deliver(body.str(), output, out);
    return kExitOk;
}

int run_grid_stats(const std::string& grid_path, double mode_bin, const std::string& format,
                   const std::string& output, std::ostream& out) {
    const grids::MagGrid g = load_grid(grid_path);
    const grids::GridStats s = grids::descriptive_stats(g, mode_bin);
    std::ostringstream body;
    if (format == "json") {
        json j;
        j["mean_nT"] = s.mean_nT;
        j["median_nT"] = s.median_nT;
        j["mode_nT"] = s.mode_nT;
        j["stddev_nT"] = s.stddev_nT;
        j["min_nT"] = s.min_nT;
        j["max_nT"] = s.max_nT;
        j["valid_cell_count"] = s.valid_cell_count;
        body << j.dump(2) << "\n";
    } else {
        grids::write_stats_csv(s, body);
    }
    deliver(body.str(), output, out);
    return kExitOk;
}

int run_grid_compare(const std::string& mode, const std::string& path_a,
                     const std::string& path_b, std::optional<double> resample_to,
                     const std::string& method_name, bool no_offset,
                     const std::string& output, std::ostream& out, std::ostream& err) {
    grids::MagGrid a = load_grid(path_a);
    grids::MagGrid b = load_grid(path_b);
    const auto method = method_name == "nearest" ? grids::ResampleMethod::Nearest
                                                 : grids::ResampleMethod::Bilinear;
    if (resample_to) {
        a = grids::resample(a, *resample_to, method);
        b = grids::resample(b, *resample_to, method);
    }

    json report;
    std::ostringstream grid_text;
    if (mode == "ratio") {
        const grids::RatioResult r = grids::ratio_compare(a, b);
        grids::write_grid(r.grid, grid_text);
        report["mode"] = "ratio";
        report["masked_zero_cells"] = r.masked_zero_cells;
        const grids::SignalRatio sr = grids::signal_ratio(a, b);
        report["signal_ratio"] = sr.ratio_mean;
        report["pearson_r"] = sr.pearson_r;
        report["cells"] = sr.cells;
    } else if (mode == "subtract") {
        const grids::SubtractResult r = grids::subtract_compare(
            a, b, no_offset ? grids::OffsetPolicy::None : grids::OffsetPolicy::ShiftNonNegative);
        grids::write_grid(r.grid, grid_text);
        report["mode"] = "subtract";
        report["offset_nT"] = r.offset_nT;
    } else {
        throw DomainError("grid-compare: --mode must be 'ratio' or 'subtract'");
    }

    if (output.empty()) {
        out << grid_text.str();
        err << report.dump() << "\n"; // keep stdout purely the grid
    } else {
        io::atomic_write_file(output, grid_text.str());
        out << report.dump(2) << "\n";
    }
    return kExitOk;
}

int run_profile(const std::string& path_a, const std::string& path_b,
                const std::string& path_elev, const std::string& line_spec, double step_m,
                const std::string& method_name, const std::string& output, std::ostream& out,
                std::ostream& err) {
    const grids::MagGrid a = load_grid(path_a);
    const grids::MagGrid b = load_grid(path_b);
    const grids::MagGrid elev = load_grid(path_elev);

    std::vector<grids::Point> polyline;
    for (const auto vertex : io::split_fields(line_spec, ';')) {
        const auto coords = io::split_fields(vertex, ',');
        if (coords.size() != 2) {
            throw DomainError("profile: --line vertices must be 'easting,northing;...'");
        }
        polyline.push_back({io::parse_double(coords[0], "--line"),
                            io::parse_double(coords[1], "--line")});
    }
    const auto method = method_name == "nearest" ? grids::ResampleMethod::Nearest
                                                 : grids::ResampleMethod::Bilinear;
    const auto samples = grids::extract_profile(a, b, elev, polyline, step_m, method);

    std::ostringstream csv;
    grids::write_profile_csv(samples, csv);

    json report;
    report["samples"] = samples.size();
    try {
        report["difference_elevation_r"] = grids::difference_elevation_correlation(samples);
    } catch (const DomainError& e) {
        report["difference_elevation_r"] = nullptr;
        report["note"] = e.what();
    }

    if (output.empty()) {
        out << csv.str();
        err << report.dump() << "\n";
    } else {
        io::atomic_write_file(output, csv.str());
        out << report.dump(2) << "\n";
    }
    return kExitOk;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Suspended-magnetometer survey design and grid comparison toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // let -o/--output appear after the subcommand

    std::string output;
    app.add_option("-o,--output", output, "Write the result to this file (atomic)")
        ->capture_default_str();

    // dynamics
    auto* dyn = app.add_subcommand("dynamics", "Closed-form swing prediction for one setup");
    ModelOptions dyn_mo;
    add_model_options(dyn, dyn_mo);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate the swing model across tether lengths");
    ModelOptions sweep_mo;
    add_model_options(sweep, sweep_mo);
    std::string sweep_lengths = "5,8,10,12,14";
    std::string sweep_noise;
    std::optional<double> sweep_fixed_exp;
    sweep->add_option("--lengths", sweep_lengths, "Comma-separated tether lengths [m]")
        ->capture_default_str();
    sweep->add_option("--noise", sweep_noise,
                      "Noise samples CSV; adds a predicted noise_nT column")
        ->check(CLI::ExistingFile);
    sweep->add_option("--fixed-exponent", sweep_fixed_exp,
                      "Pin the noise-model exponent (e.g. -2)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Time-domain pendulum simulation (oracle)");
    ModelOptions sim_mo;
    add_model_options(sim, sim_mo);
    std::optional<double> sim_dt, sim_duration;
    double sim_theta0 = 0.0;
    bool sim_measure = false;
    sim->add_option("--dt", sim_dt, "Time step [s] (default: natural period / 200)");
    sim->add_option("--duration", sim_duration, "Simulated time [s]");
    sim->add_option("--initial-angle", sim_theta0, "Initial swing angle [rad]")
        ->capture_default_str();
    sim->add_flag("--measure", sim_measure,
                  "Emit measured amplitude/settling JSON instead of the trajectory CSV");

    // emi-fit
    auto* fit = app.add_subcommand("emi-fit", "Fit the noise-vs-distance power law");
    std::string fit_samples;
    std::optional<double> fit_fixed_exp;
    fit->add_option("--samples", fit_samples, "Noise samples CSV (distance_m,noise_nT)")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--fixed-exponent", fit_fixed_exp, "Pin the exponent (e.g. -2)");

    // select-length
    auto* sel = app.add_subcommand("select-length",
                                   "Pick a tether length from a sweep and noise samples");
    std::string sel_noise, sel_sweep, sel_policy = "threshold", sel_weights = "1,1,1";
    double sel_threshold = 1.0;
    sel->add_option("--noise", sel_noise, "Noise samples CSV")
        ->required()
        ->check(CLI::ExistingFile);
    sel->add_option("--sweep", sel_sweep, "Sweep CSV (length_m,amplitude_m,settling_s)")
        ->required()
        ->check(CLI::ExistingFile);
    sel->add_option("--noise-threshold", sel_threshold, "Max acceptable noise [nT]")
        ->capture_default_str();
    sel->add_option("--policy", sel_policy, "threshold | weighted")->capture_default_str();
    sel->add_option("--weights", sel_weights, "Weighted policy weights w1,w2,w3")
        ->capture_default_str();

    // economics
    auto* eco = app.add_subcommand("economics", "Survey platform cost metrics and comparison");
    bool eco_defaults = false;
    std::string eco_platforms, eco_format = "table";
    eco->add_flag("--paper-defaults", eco_defaults, "Use the bundled reference platforms");
    eco->add_option("--platforms", eco_platforms, "Platform specs JSON array")
        ->check(CLI::ExistingFile);
    eco->add_option("--format", eco_format, "table | csv | json")->capture_default_str();

    // grid-stats
    auto* gst = app.add_subcommand("grid-stats", "Descriptive statistics of a grid");
    std::string gst_grid, gst_format = "csv";
    double gst_bin = 1.0;
    gst->add_option("grid", gst_grid, "Grid file")->required()->check(CLI::ExistingFile);
    gst->add_option("--mode-bin", gst_bin, "Histogram bin width for the mode [nT]")
        ->capture_default_str();
    gst->add_option("--format", gst_format, "csv | json")->capture_default_str();

    // grid-compare
    auto* gcp = app.add_subcommand("grid-compare", "Ratio or subtraction comparison map");
    std::string gcp_mode = "ratio", gcp_a, gcp_b, gcp_method = "bilinear";
    std::optional<double> gcp_resample;
    bool gcp_no_offset = false;
    gcp->add_option("--mode", gcp_mode, "ratio | subtract")->capture_default_str();
    gcp->add_option("a", gcp_a, "First grid (numerator / minuend)")
        ->required()
        ->check(CLI::ExistingFile);
    gcp->add_option("b", gcp_b, "Second grid (denominator / subtrahend)")
        ->required()
        ->check(CLI::ExistingFile);
    gcp->add_option("--resample-to", gcp_resample,
                    "Resample both grids to this cell size [m] before comparing");
    gcp->add_option("--method", gcp_method, "bilinear | nearest")->capture_default_str();
    gcp->add_flag("--no-offset", gcp_no_offset, "Skip the non-negative zero offset");

    // profile
    auto* prof = app.add_subcommand("profile",
                                    "Extract an along-line profile from two grids + elevation");
    std::string prof_a, prof_b, prof_elev, prof_line, prof_method = "bilinear";
    double prof_step = 25.0;
    prof->add_option("--grid-a", prof_a, "First TMI grid")->required()->check(CLI::ExistingFile);
    prof->add_option("--grid-b", prof_b, "Second TMI grid")->required()->check(CLI::ExistingFile);
    prof->add_option("--elevation", prof_elev, "Elevation grid")
        ->required()
        ->check(CLI::ExistingFile);
    prof->add_option("--line", prof_line, "Polyline 'e1,n1;e2,n2;...'")->required();
    prof->add_option("--step-m", prof_step, "Chainage step [m]")->capture_default_str();
    prof->add_option("--method", prof_method, "bilinear | nearest")->capture_default_str();

    try {
        std::reverse(args.begin(), args.end()); // CLI11 vector parse wants reversed args
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << (app.get_subcommands().empty() ? app.help()
                                                  : app.get_subcommands().front()->help());
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n";
        err << app.help();
        return kExitUsage;
    }

    try {
        if (*dyn) return run_dynamics(dyn_mo, output, out, err);
        if (*sweep) {
            return run_sweep(sweep_mo, sweep_lengths, sweep_noise, sweep_fixed_exp, output,
                             out);
        }
        if (*sim) {
            return run_simulate(sim_mo, sim_dt, sim_duration, sim_theta0, sim_measure, output,
                                out);
        }
        if (*fit) return run_emi_fit(fit_samples, fit_fixed_exp, output, out);
        if (*sel) {
            return run_select_length(sel_noise, sel_sweep, sel_threshold, sel_policy,
                                     sel_weights, output, out);
        }
        if (*eco) return run_economics(eco_defaults, eco_platforms, eco_format, output, out);
        if (*gst) return run_grid_stats(gst_grid, gst_bin, gst_format, output, out);
        if (*gcp) {
            return run_grid_compare(gcp_mode, gcp_a, gcp_b, gcp_resample, gcp_method,
                                    gcp_no_offset, output, out, err);
        }
        if (*prof) {
            return run_profile(prof_a, prof_b, prof_elev, prof_line, prof_step, prof_method,
                               output, out, err);
        }
        err << "usage error: no subcommand\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

} // namespace magsling::cli

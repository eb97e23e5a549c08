#include "magsling/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <json.hpp>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::dynamics {

namespace {

using nlohmann::json;

double get_num(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ParseError(std::string("calibration: missing key '") + key + "'");
    }
    if (!j.at(key).is_number()) {
        throw ParseError(std::string("calibration: key '") + key + "' is not a number");
    }
    return j.at(key).get<double>();
}

} // namespace

Calibration builtin_fig4_calibration() {
    Calibration c;
    c.name = "fig4-calibration";
    c.payload = {3.0, 0.0, 0.05};
    c.flight = {10.55, 7.81, 1.225, 9.81};
    c.damping_ratio = 0.9999;
    c.a_final_fraction = 0.0094;
    return c;
}

ReferenceCurves builtin_fig4_reference_curves() {
    ReferenceCurves r;
    r.lengths_m = {5.0, 8.0, 10.0, 12.0, 14.0};
    r.amplitudes_m = {4.0, 5.0, 6.0, 7.0, 8.0};
    r.settlings_s = {2.7, 3.4, 4.5, 5.75, 7.0};
    r.select_zone_min_m = 9.5;
    r.select_zone_max_m = 10.5;
    return r;
}

Calibration load_calibration(const std::filesystem::path& json_path) {
    json j;
    try {
        j = json::parse(io::read_file(json_path));
    } catch (const json::parse_error& e) {
        throw ParseError("calibration: " + json_path.string() + ": " + e.what());
    }
    Calibration c;
    c.name = j.value("name", std::string{});
    c.payload.mass_kg = get_num(j, "mass_kg");
    c.payload.drag_coeff = get_num(j, "drag_coeff", 0.0);
    c.payload.cross_section_m2 = get_num(j, "cross_section_m2", 0.0);
    c.flight.speed_mps = get_num(j, "speed_mps");
    c.flight.turn_radius_m = get_num(j, "turn_radius_m");
    c.flight.air_density_kgm3 = get_num(j, "air_density_kgm3", 1.225);
    c.flight.gravity_mps2 = get_num(j, "gravity_mps2", 9.81);
    c.damping_ratio = get_num(j, "damping_ratio");
    c.a_final_fraction = get_num(j, "a_final_fraction", 0.05);
    if (j.contains("length_m")) c.length_m = get_num(j, "length_m");
    c.payload.validate();
    c.flight.validate();
    c.tether(c.length_m.value_or(1.0)).validate(); // damping/length ranges
    return c;
}

std::string calibration_to_json(const Calibration& c) {
    json j;
    j["name"] = c.name;
    j["mass_kg"] = c.payload.mass_kg;
    j["drag_coeff"] = c.payload.drag_coeff;
    j["cross_section_m2"] = c.payload.cross_section_m2;
    j["speed_mps"] = c.flight.speed_mps;
    j["turn_radius_m"] = c.flight.turn_radius_m;
    j["air_density_kgm3"] = c.flight.air_density_kgm3;
    j["gravity_mps2"] = c.flight.gravity_mps2;
    j["damping_ratio"] = c.damping_ratio;
    j["a_final_fraction"] = c.a_final_fraction;
    if (c.length_m) j["length_m"] = *c.length_m;
    return j.dump(2) + "\n";
}

double calibration_max_curve_error(const Calibration& c, const ReferenceCurves& curves) {
    double worst = 0.0;
    for (std::size_t i = 0; i < curves.lengths_m.size(); ++i) {
        const SwingPrediction p = predict(c.payload, c.tether(curves.lengths_m[i]), c.flight,
                                          c.a_final_fraction);
        worst = std::max(worst, std::abs(p.amplitude_m / curves.amplitudes_m[i] - 1.0));
        worst = std::max(worst, std::abs(p.settling_s / curves.settlings_s[i] - 1.0));
    }
    return worst;
}

namespace {

// Fit coordinates: x = (pivot acceleration a, squared turn rate q, ln(1/band)).
// V and r follow from a and q; damping ratio is held at the top of its range
// where the published curves are reproducible (lighter damping makes the
// amplitude curve non-monotone near resonance).
Calibration make_candidate(const std::array<double, 3>& x, double mass_kg, double zeta) {
    Calibration c;
    c.name = "fitted-calibration";
    const double a = x[0], q = x[1], big_k = x[2];
    c.payload = {mass_kg, 0.0, 0.05};
    c.flight = {a / std::sqrt(q), a / q, 1.225, 9.81};
    c.damping_ratio = zeta;
    c.a_final_fraction = std::exp(-big_k);
    return c;
}

bool candidate_valid(const std::array<double, 3>& x) {
    return x[0] > 0.1 && x[0] < 50.0 && x[1] > 0.05 && x[1] < 5.0 && x[2] > 0.5 && x[2] < 8.0;
}

// Nelder-Mead on the worst relative curve error.
std::array<double, 3> nelder_mead(const std::function<double(const std::array<double, 3>&)>& f,
                                  std::array<double, 3> start, int max_iter) {
    constexpr int n = 3;
    std::array<std::array<double, 3>, n + 1> simplex;
    std::array<double, n + 1> fv;
    simplex[0] = start;
    for (int i = 0; i < n; ++i) {
        simplex[i + 1] = start;
        simplex[i + 1][i] += (start[i] != 0.0 ? 0.1 * start[i] : 0.05);
    }
    for (int i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    auto order = [&] {
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (fv[j] < fv[i]) {
                    std::swap(fv[i], fv[j]);
                    std::swap(simplex[i], simplex[j]);
                }
    };
    auto centroid = [&] {
        std::array<double, 3> c{0, 0, 0};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < 3; ++k) c[k] += simplex[i][k] / n;
        return c;
    };
    auto blend = [](const std::array<double, 3>& p, const std::array<double, 3>& q, double t) {
        std::array<double, 3> r;
        for (int k = 0; k < 3; ++k) r[k] = p[k] + t * (q[k] - p[k]);
        return r;
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        if (fv[n] - fv[0] < 1e-12) break;
        const auto c = centroid();
        const auto refl = blend(c, simplex[n], -1.0);
        const double fr = f(refl);
        if (fr < fv[0]) {
            const auto exp_ = blend(c, simplex[n], -2.0);
            const double fe = f(exp_);
            simplex[n] = fe < fr ? exp_ : refl;
            fv[n] = std::min(fe, fr);
        } else if (fr < fv[n - 1]) {
            simplex[n] = refl;
            fv[n] = fr;
        } else {
            const auto con = blend(c, simplex[n], 0.5);
            const double fc = f(con);
            if (fc < fv[n]) {
                simplex[n] = con;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    simplex[i] = blend(simplex[0], simplex[i], 0.5);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return simplex[0];
}

} // namespace

Calibration fit_calibration(const ReferenceCurves& curves, double mass_kg) {
    if (curves.lengths_m.empty() || curves.lengths_m.size() != curves.amplitudes_m.size() ||
        curves.lengths_m.size() != curves.settlings_s.size()) {
        throw DomainError("calibration: reference curves need matching, non-empty columns");
    }
    const double zeta = 0.9999;
    auto objective = [&](const std::array<double, 3>& x) {
        if (!candidate_valid(x)) return 1e6;
        return calibration_max_curve_error(make_candidate(x, mass_kg, zeta), curves);
    };

    std::mt19937 rng(20240); // deterministic multi-start
    std::uniform_real_distribution<double> ua(4.0, 16.0), uq(0.6, 2.4), uk(3.0, 6.0);
    std::array<double, 3> best{10.0, 1.3, 4.7};
    double best_err = objective(best);
    for (int s = 0; s < 24; ++s) {
        std::array<double, 3> x0{ua(rng), uq(rng), uk(rng)};
        const auto x = nelder_mead(objective, x0, 400);
        const double e = objective(x);
        if (e < best_err) {
            best_err = e;
            best = x;
        }
    }
    return make_candidate(best, mass_kg, zeta);
}

} // namespace magsling::dynamics

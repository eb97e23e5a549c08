#include "magsling/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::dynamics {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError("dynamics: " + msg);
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string("dynamics: ") + name + " not finite");
}

} // namespace

void PayloadSpec::validate() const {
    require_finite(mass_kg, "mass_kg");
    require_finite(drag_coeff, "drag_coeff");
    require_finite(cross_section_m2, "cross_section_m2");
    require(mass_kg > 0.0, "mass_kg must be > 0, got " + io::format_double(mass_kg));
    require(drag_coeff >= 0.0, "drag_coeff must be >= 0");
    require(cross_section_m2 >= 0.0, "cross_section_m2 must be >= 0");
}

void TetherSpec::validate() const {
    require_finite(length_m, "length_m");
    require_finite(damping_ratio, "damping_ratio");
    require(length_m > 0.0, "length_m must be > 0, got " + io::format_double(length_m));
    require(damping_ratio >= 0.0 && damping_ratio < 1.0,
            "damping_ratio must be in [0,1), got " + io::format_double(damping_ratio));
}

void FlightCondition::validate() const {
    require_finite(speed_mps, "speed_mps");
    require_finite(turn_radius_m, "turn_radius_m");
    require_finite(air_density_kgm3, "air_density_kgm3");
    require_finite(gravity_mps2, "gravity_mps2");
    require(speed_mps >= 0.0, "speed_mps must be >= 0");
    require(turn_radius_m > 0.0, "turn_radius_m must be > 0");
    require(air_density_kgm3 > 0.0, "air_density_kgm3 must be > 0");
    require(gravity_mps2 > 0.0, "gravity_mps2 must be > 0");
}

Forces swing_forces(const PayloadSpec& payload, const FlightCondition& flight) {
    payload.validate();
    flight.validate();
    const double v2 = flight.speed_mps * flight.speed_mps;
    Forces f;
    f.centrifugal_N = payload.mass_kg * v2 / flight.turn_radius_m;
    f.rope_angle_rad = std::atan(f.centrifugal_N / (payload.mass_kg * flight.gravity_mps2));
    f.drag_N = 0.5 * payload.drag_coeff * payload.cross_section_m2 * flight.air_density_kgm3 * v2;
    const double weight = payload.mass_kg * flight.gravity_mps2;
    f.net_force_N = std::sqrt(f.centrifugal_N * f.centrifugal_N + weight * weight +
                              f.drag_N * f.drag_N);
    return f;
}

OscillatorParams oscillator_params(const PayloadSpec& payload, const TetherSpec& tether,
                                   double gravity_mps2) {
    payload.validate();
    tether.validate();
    require(gravity_mps2 > 0.0, "gravity_mps2 must be > 0");
    OscillatorParams p;
    p.natural_freq_radps = std::sqrt(gravity_mps2 / tether.length_m);
    p.rope_damping_Nspm = 2.0 * payload.mass_kg * tether.damping_ratio * p.natural_freq_radps;
    return p;
}

double swing_amplitude(const PayloadSpec& payload, const TetherSpec& tether,
                       const FlightCondition& flight) {
    const Forces f = swing_forces(payload, flight);
    const OscillatorParams osc = oscillator_params(payload, tether, flight.gravity_mps2);

    const double wn2 = osc.natural_freq_radps * osc.natural_freq_radps;
    const double forcing = flight.speed_mps / flight.turn_radius_m; // turn rate, rad/s
    const double stiffness_term = wn2 - forcing * forcing;
    const double damping_term =
        osc.rope_damping_Nspm * flight.speed_mps / (payload.mass_kg * flight.turn_radius_m);
    const double denom =
        std::sqrt(stiffness_term * stiffness_term + damping_term * damping_term);
    if (denom == 0.0) {
        throw ResonanceError("dynamics: resonance: undamped forcing at the natural frequency "
                             "(omega_n^2 == V^2/r^2 with zero rope damping), amplitude unbounded");
    }
    return (f.net_force_N / payload.mass_kg) / denom;
}

SettlingResult settling_time(const PayloadSpec& payload, const TetherSpec& tether,
                             const FlightCondition& flight, double amplitude_m,
                             double a_final_m) {
    payload.validate();
    tether.validate();
    flight.validate();
    require(amplitude_m > 0.0, "settling_time: amplitude must be > 0");
    require(a_final_m > 0.0, "settling_time: final amplitude must be > 0");
    require(a_final_m <= amplitude_m,
            "settling_time: final amplitude " + io::format_double(a_final_m) +
                " exceeds initial amplitude " + io::format_double(amplitude_m));

    const OscillatorParams osc = oscillator_params(payload, tether, flight.gravity_mps2);
    SettlingResult r;
    r.eff_damping = osc.rope_damping_Nspm + 0.5 * payload.drag_coeff *
                                                payload.cross_section_m2 *
                                                flight.air_density_kgm3 * flight.speed_mps;
    if (r.eff_damping == 0.0) {
        throw DomainError("dynamics: settling_time: zero effective damping, oscillation never "
                          "settles");
    }
    r.settling_s = std::log(amplitude_m / a_final_m) /
                   ((r.eff_damping / (2.0 * payload.mass_kg)) * osc.natural_freq_radps);
    return r;
}

SwingPrediction predict(const PayloadSpec& payload, const TetherSpec& tether,
                        const FlightCondition& flight, double a_final_fraction) {
    require(a_final_fraction > 0.0 && a_final_fraction < 1.0,
            "a_final_fraction must be in (0,1), got " + io::format_double(a_final_fraction));
    const Forces f = swing_forces(payload, flight);
    const OscillatorParams osc = oscillator_params(payload, tether, flight.gravity_mps2);
    SwingPrediction p;
    p.centrifugal_N = f.centrifugal_N;
    p.rope_angle_rad = f.rope_angle_rad;
    p.drag_N = f.drag_N;
    p.net_force_N = f.net_force_N;
    p.natural_freq_radps = osc.natural_freq_radps;
    p.rope_damping_Nspm = osc.rope_damping_Nspm;
    p.amplitude_m = swing_amplitude(payload, tether, flight);
    p.final_amplitude_m = a_final_fraction * p.amplitude_m;
    const SettlingResult s = settling_time(payload, tether, flight, p.amplitude_m,
                                           p.final_amplitude_m);
    p.eff_damping = s.eff_damping;
    p.settling_s = s.settling_s;
    return p;
}

std::vector<SweepRow> length_sweep(const PayloadSpec& payload, const FlightCondition& flight,
                                   double damping_ratio, std::span<const double> lengths_m,
                                   double a_final_fraction) {
    require(!lengths_m.empty(), "length_sweep: empty length list");
    std::vector<double> lengths(lengths_m.begin(), lengths_m.end());
    std::sort(lengths.begin(), lengths.end());

    std::vector<SweepRow> rows;
    rows.reserve(lengths.size());
    for (double length : lengths) {
        try {
            const TetherSpec tether{length, damping_ratio};
            const SwingPrediction p = predict(payload, tether, flight, a_final_fraction);
            rows.push_back({length, p.amplitude_m, p.settling_s});
        } catch (const DomainError& e) {
            throw DomainError("length_sweep at L=" + io::format_double(length) + " m: " +
                              e.what());
        }
    }
    return rows;
}

} // namespace magsling::dynamics

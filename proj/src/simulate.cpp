#include "magsling/simulate.hpp"

#include <cmath>
#include <numbers>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::simulate {

namespace {

struct State {
    double theta;
    double omega;
};

struct Derivative {
    double dtheta;
    double domega;
};

} // namespace

double natural_period_s(const dynamics::TetherSpec& tether, double gravity_mps2) {
    return 2.0 * std::numbers::pi * std::sqrt(tether.length_m / gravity_mps2);
}

void SimConfig::validate() const {
    payload.validate();
    tether.validate();
    flight.validate();
    if (!(settle_band_fraction > 0.0 && settle_band_fraction < 1.0)) {
        throw DomainError("simulate: settle_band_fraction must be in (0,1)");
    }
    if (std::abs(initial_angle_rad) >= std::numbers::pi / 2.0) {
        throw DomainError("simulate: initial_angle_rad must lie in (-pi/2, pi/2)");
    }
    const double period = natural_period_s(tether, flight.gravity_mps2);
    if (!(time_step_s > 0.0) || time_step_s > 0.01 * period) {
        throw DomainError("simulate: time_step_s must be in (0, 0.01*period]; period is " +
                          io::format_double(period) + " s");
    }
    if (duration_s < 10.0 * period) {
        throw DomainError("simulate: duration_s must cover at least 10 natural periods (" +
                          io::format_double(10.0 * period) + " s)");
    }
}

Trajectory simulate_pendulum(const SimConfig& cfg) {
    cfg.validate();

    const double length = cfg.tether.length_m;
    const double mass = cfg.payload.mass_kg;
    const double gravity = cfg.flight.gravity_mps2;
    const double rope_damping =
        2.0 * mass * cfg.tether.damping_ratio * std::sqrt(gravity / length);
    const double drag_factor = 0.5 * cfg.payload.drag_coeff * cfg.payload.cross_section_m2 *
                               cfg.flight.air_density_kgm3 * length / mass;
    // Forcing lasts one quarter of the turn circumference at flight speed;
    // zero speed means no turn and a free pendulum.
    const bool forced = cfg.flight.speed_mps > 0.0;
    const double turn_accel =
        forced ? cfg.flight.speed_mps * cfg.flight.speed_mps / cfg.flight.turn_radius_m : 0.0;
    const double forcing_end =
        forced ? std::numbers::pi * cfg.flight.turn_radius_m / (2.0 * cfg.flight.speed_mps)
               : 0.0;

    const double dt = cfg.time_step_s;
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.duration_s / dt));

    auto deriv = [&](double t, const State& s) -> Derivative {
        const double pivot_accel = t < forcing_end ? turn_accel : 0.0;
        const double domega = -(gravity / length) * std::sin(s.theta) -
                              (pivot_accel / length) * std::cos(s.theta) -
                              (rope_damping / mass) * s.omega -
                              drag_factor * std::abs(s.omega) * s.omega;
        return {s.omega, domega};
    };
    auto energy = [&](const State& s) {
        return 0.5 * mass * length * length * s.omega * s.omega +
               mass * gravity * length * (1.0 - std::cos(s.theta));
    };

    Trajectory traj;
    traj.times_s.reserve(n_steps + 1);
    traj.swing_angle_rad.reserve(n_steps + 1);
    traj.angular_rate_radps.reserve(n_steps + 1);
    traj.bob_offset_m.reserve(n_steps + 1);
    traj.forcing_end_s = forcing_end;
    traj.natural_period_s = natural_period_s(cfg.tether, gravity);

    State s{cfg.initial_angle_rad, 0.0};
    traj.times_s.push_back(0.0);
    traj.swing_angle_rad.push_back(s.theta);
    traj.angular_rate_radps.push_back(s.omega);
    traj.bob_offset_m.push_back(length * std::sin(s.theta));

    double prev_energy = energy(s);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Derivative k1 = deriv(t, s);
        const Derivative k2 = deriv(t + 0.5 * dt, {s.theta + 0.5 * dt * k1.dtheta,
                                                   s.omega + 0.5 * dt * k1.domega});
        const Derivative k3 = deriv(t + 0.5 * dt, {s.theta + 0.5 * dt * k2.dtheta,
                                                   s.omega + 0.5 * dt * k2.domega});
        const Derivative k4 =
            deriv(t + dt, {s.theta + dt * k3.dtheta, s.omega + dt * k3.domega});
        s.theta += dt / 6.0 * (k1.dtheta + 2.0 * (k2.dtheta + k3.dtheta) + k4.dtheta);
        s.omega += dt / 6.0 * (k1.domega + 2.0 * (k2.domega + k3.domega) + k4.domega);
        const double t_next = static_cast<double>(i + 1) * dt;

        if (std::abs(s.theta) > std::numbers::pi / 2.0) {
            throw InstabilityError("simulate: |theta| exceeded pi/2 at t=" +
                                   io::format_double(t_next) + " s; model regime violated");
        }
        const double e = energy(s);
        if (t >= forcing_end) {
            // Damping is non-negative, so mechanical energy cannot grow once
            // the pivot stops accelerating (tolerance covers RK4 roundoff).
            if (e > prev_energy * (1.0 + 1e-9) + 1e-12) {
                throw InstabilityError("simulate: energy grew step-over-step at t=" +
                                       io::format_double(t_next) + " s; integration unstable");
            }
        }
        prev_energy = e;

        traj.times_s.push_back(t_next);
        traj.swing_angle_rad.push_back(s.theta);
        traj.angular_rate_radps.push_back(s.omega);
        traj.bob_offset_m.push_back(length * std::sin(s.theta));
    }
    return traj;
}

Measurement measure_amplitude_settling(const Trajectory& traj, double band_fraction) {
    if (traj.times_s.size() < 2 || traj.times_s.size() != traj.bob_offset_m.size()) {
        throw InsufficientDataError("simulate: trajectory too short to measure");
    }
    if (!(band_fraction > 0.0 && band_fraction < 1.0)) {
        throw DomainError("simulate: band_fraction must be in (0,1)");
    }

    Measurement m;
    for (double off : traj.bob_offset_m) m.amplitude_m = std::max(m.amplitude_m, std::abs(off));
    if (m.amplitude_m == 0.0) {
        return m; // constant-zero trajectory: degenerate settling of 0
    }

    if (traj.forcing_end_s > traj.times_s.back()) {
        throw InsufficientDataError("simulate: no samples after forcing end at t=" +
                                    io::format_double(traj.forcing_end_s) + " s");
    }

    const double band = band_fraction * m.amplitude_m;
    std::size_t last_exceed = traj.times_s.size(); // sentinel: none
    for (std::size_t i = 0; i < traj.times_s.size(); ++i) {
        if (traj.times_s[i] < traj.forcing_end_s) continue;
        if (std::abs(traj.bob_offset_m[i]) > band) last_exceed = i;
    }
    if (last_exceed == traj.times_s.size()) {
        m.settling_s = 0.0; // already inside the band when forcing ended
        return m;
    }
    if (last_exceed == traj.times_s.size() - 1) {
        throw NoSettleError("simulate: offset still outside the settle band at the end of the "
                            "trajectory (t=" +
                            io::format_double(traj.times_s.back()) + " s)");
    }
    const double entered = traj.times_s[last_exceed + 1];
    if (traj.natural_period_s > 0.0 &&
        traj.times_s.back() - entered < traj.natural_period_s) {
        // an in-band tail shorter than one swing period does not establish
        // that the oscillation actually settled
        throw NoSettleError("simulate: trajectory ends less than one period after the last "
                            "band exceedance; settling not established");
    }
    m.settling_s = entered - traj.forcing_end_s;
    return m;
}

} // namespace magsling::simulate

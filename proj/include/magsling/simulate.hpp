// Time-domain oracle for the closed-form swing model: a planar pendulum
// whose pivot accelerates laterally through the initial turn, with linear
// rope damping and quadratic bob drag. Amplitude and settling time are
// measured from the trajectory the same way the field measurements were
// taken from video: peak offset, then the time after the turn until the
// offset stays inside a fractional band of the peak.
#pragma once

#include <vector>

#include "magsling/dynamics.hpp"

namespace magsling::simulate {

struct SimConfig {
    dynamics::PayloadSpec payload;
    dynamics::TetherSpec tether;
    dynamics::FlightCondition flight;  ///< speed_mps == 0 disables the forcing entirely
    double time_step_s = 0.0;          ///< <= 0.01 * natural period
    double duration_s = 0.0;           ///< >= 10 natural periods
    double settle_band_fraction = 0.05; ///< in (0,1)
    double initial_angle_rad = 0.0;    ///< in (-pi/2, pi/2); free-swing experiments

    void validate() const;
};

struct Trajectory {
    std::vector<double> times_s;          ///< constant-step, strictly increasing
    std::vector<double> swing_angle_rad;  ///< theta, 0 = hanging vertical
    std::vector<double> angular_rate_radps; ///< theta-dot (for energy audits)
    std::vector<double> bob_offset_m;     ///< L * sin(theta)
    double forcing_end_s = 0.0;           ///< pivot acceleration stops here
    double natural_period_s = 0.0;        ///< 0 = unknown (hand-built trajectories)
};

/// Fixed-step RK4 integration of
///   theta'' = -(g/L) sin(theta) - (a_pivot/L) cos(theta)
///             - (c/m_p) theta' - (1/2 C_d A_p rho L |theta'| theta') / m_p
/// with a_pivot = V^2/r while the aircraft covers the first quarter of the
/// turn circumference and 0 afterwards. Starts from rest.
/// Throws InstabilityError if |theta| exceeds pi/2 or mechanical energy grows
/// step-over-step once forcing has ended.
Trajectory simulate_pendulum(const SimConfig& cfg);

struct Measurement {
    double amplitude_m = 0.0; ///< max |bob_offset| over the whole trajectory
    double settling_s = 0.0;  ///< time after forcing end until permanently in band
};

/// Measure peak offset and settling time from a trajectory. Throws
/// NoSettleError when the band is never permanently entered (permanence
/// requires the trailing in-band stretch to last at least one natural period
/// when the trajectory declares one), and InsufficientDataError when no
/// samples lie after forcing end.
Measurement measure_amplitude_settling(const Trajectory& traj, double band_fraction);

/// Convenience: natural period 2*pi*sqrt(L/g).
double natural_period_s(const dynamics::TetherSpec& tether, double gravity_mps2);

} // namespace magsling::simulate

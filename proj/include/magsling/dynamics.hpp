// Closed-form slung-payload swing model.
//
// A payload of mass m_p hangs on a tether of length L beneath an aircraft
// that enters a straight survey line through a turn of radius r at speed V.
// The model predicts the swing amplitude and settling time of the payload
// from the force balance during the turn and a damped-harmonic-oscillator
// approximation. All angles are radians; all quantities SI.
#pragma once

#include <span>
#include <vector>

namespace magsling::dynamics {

/// Suspended sensor package.
struct PayloadSpec {
    double mass_kg = 0.0;         ///< m_p > 0
    double drag_coeff = 0.0;      ///< C_d >= 0, dimensionless
    double cross_section_m2 = 0.0; ///< A_p >= 0, frontal area

    void validate() const; ///< throws DomainError on violated invariants
};

/// Suspension rope.
struct TetherSpec {
    double length_m = 0.0;      ///< L > 0
    double damping_ratio = 0.0; ///< zeta in [0,1); underdamped regime

    void validate() const;
};

/// Flight state entering a survey line.
struct FlightCondition {
    double speed_mps = 0.0;        ///< V > 0 (0 allowed only for the static case)
    double turn_radius_m = 0.0;    ///< r > 0
    double air_density_kgm3 = 1.225;
    double gravity_mps2 = 9.81;

    void validate() const;
};

/// Force balance on the payload during the turn.
struct Forces {
    double centrifugal_N = 0.0; ///< F_c = m_p V^2 / r
    double rope_angle_rad = 0.0; ///< theta = atan(F_c / m_p g)
    double drag_N = 0.0;        ///< F_d = 1/2 C_d A_p rho V^2
    double net_force_N = 0.0;   ///< F_n = sqrt(F_c^2 + (m_p g)^2 + F_d^2)
};

struct OscillatorParams {
    double natural_freq_radps = 0.0; ///< omega_n = sqrt(g/L)
    double rope_damping_Nspm = 0.0;  ///< c = 2 m_p zeta omega_n
};

/// Full closed-form prediction for one (payload, tether, flight) combination.
struct SwingPrediction {
    double centrifugal_N = 0.0;
    double rope_angle_rad = 0.0;
    double drag_N = 0.0;
    double net_force_N = 0.0;
    double natural_freq_radps = 0.0;
    double rope_damping_Nspm = 0.0;
    double amplitude_m = 0.0;      ///< A, swing amplitude
    double eff_damping = 0.0;      ///< c_eff = c + 1/2 C_d A_p rho V
    double settling_s = 0.0;       ///< T_s, time to decay to final_amplitude_m
    double final_amplitude_m = 0.0;
};

/// Forces on the payload during the turn. V = 0 degenerates to hanging
/// straight down (F_c = F_d = 0, F_n = m_p g).
Forces swing_forces(const PayloadSpec& payload, const FlightCondition& flight);

/// Natural frequency of the pendulum and the rope's linear damping coefficient.
OscillatorParams oscillator_params(const PayloadSpec& payload, const TetherSpec& tether,
                                   double gravity_mps2);

/// Swing amplitude of the forced damped oscillator:
///   A = (F_n/m_p) / sqrt((omega_n^2 - V^2/r^2)^2 + (c V / (m_p r))^2)
/// Throws ResonanceError when the denominator is exactly zero (undamped
/// forcing at the natural frequency); never returns infinity.
/// V = 0 is the static limit A = L; callers should treat it as out-of-regime.
double swing_amplitude(const PayloadSpec& payload, const TetherSpec& tether,
                       const FlightCondition& flight);

struct SettlingResult {
    double eff_damping = 0.0;
    double settling_s = 0.0;
};

/// Settling time of the underdamped decay from amplitude_m down to
/// a_final_m:
///   T_s = ln(A / A_final) / ((c_eff / 2 m_p) omega_n)
/// a_final_m == amplitude_m yields T_s = 0; a_final_m > amplitude_m or
/// a_final_m <= 0 or c_eff == 0 is a DomainError.
SettlingResult settling_time(const PayloadSpec& payload, const TetherSpec& tether,
                             const FlightCondition& flight, double amplitude_m,
                             double a_final_m);

/// All of the above in one evaluation; final amplitude given as a fraction
/// of the predicted amplitude.
SwingPrediction predict(const PayloadSpec& payload, const TetherSpec& tether,
                        const FlightCondition& flight, double a_final_fraction);

struct SweepRow {
    double length_m = 0.0;
    double amplitude_m = 0.0;
    double settling_s = 0.0;
};

/// Evaluate the model across candidate tether lengths (rows sorted by length).
/// Per-length failures propagate with the offending length in the message.
std::vector<SweepRow> length_sweep(const PayloadSpec& payload, const FlightCondition& flight,
                                   double damping_ratio, std::span<const double> lengths_m,
                                   double a_final_fraction);

} // namespace magsling::dynamics

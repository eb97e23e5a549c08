// Magnetometer noise vs distance from the aircraft's propulsion system,
// modeled as a power law N(d) = k * d^p fitted in log-log space, and the
// tether-length selection that trades swing dynamics against sensor noise.
#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "magsling/dynamics.hpp"

namespace magsling::emi {

struct NoiseSample {
    double distance_m = 0.0; ///< > 0
    double noise_nT = 0.0;   ///< >= 0; zero excluded from log fits
};

struct EmiModel {
    double coefficient_k = 0.0;   ///< nT * m^(-p), > 0
    double exponent_p = 0.0;      ///< < 0 (noise decays with distance)
    double fit_residual_rms = 0.0; ///< RMS of ln-space residuals
};

struct FitReport {
    EmiModel model;
    std::size_t samples_used = 0;
    std::size_t excluded_zero_noise = 0; ///< zero-noise samples dropped from the fit
};

/// Least-squares line fit of ln(noise) on ln(distance). With fixed_exponent
/// set (e.g. -2 for an inverse-square model) only the coefficient is fitted.
/// Requires >= 2 usable samples at distinct distances and a decaying trend
/// (fitted p < 0); violations raise DomainError / InsufficientDataError.
FitReport fit_noise_model(std::span<const NoiseSample> samples,
                          std::optional<double> fixed_exponent = std::nullopt);

/// k * d^p. DomainError on d <= 0.
double predict_noise(const EmiModel& model, double distance_m);

enum class PolicyKind { Threshold, Weighted };

struct SelectionPolicy {
    PolicyKind kind = PolicyKind::Threshold;
    double noise_threshold_nT = 1.0;      ///< threshold policy: max acceptable noise
    std::array<double, 3> weights{1, 1, 1}; ///< weighted policy: amplitude, settling, noise
};

struct SelectionRow {
    double length_m = 0.0;
    double amplitude_m = 0.0;
    double settling_s = 0.0;
    double noise_nT = 0.0;
};

struct SelectionReport {
    double selected_length_m = 0.0;
    std::vector<SelectionRow> table;
    SelectionPolicy policy;
    EmiModel model;
};

/// Pick a tether length from a dynamics sweep and a fitted noise model.
/// Threshold policy: the shortest length whose predicted noise is within the
/// threshold (shorter = less swing). Weighted policy: minimize the weighted
/// sum of min-max normalized amplitude, settling time and noise; ties go to
/// the shorter length. Throws NoFeasibleLengthError when no length passes
/// the threshold.
SelectionReport select_tether_length(std::span<const dynamics::SweepRow> sweep,
                                     const EmiModel& model, const SelectionPolicy& policy);

/// CSV with header "distance_m,noise_nT".
std::vector<NoiseSample> read_noise_csv(std::istream& in);
void write_noise_csv(std::span<const NoiseSample> samples, std::ostream& out);

} // namespace magsling::emi

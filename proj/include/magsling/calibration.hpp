// Named parameter sets for the swing model, plus the reference trade-off
// curves they are fitted against.
//
// The "fig4-calibration" set reproduces the published amplitude/settling
// trade-off curves of the suspended-magnetometer design study. The source
// study does not state the physical parameters behind those curves, so the
// set shipped here was obtained by least-squares fit of the closed-form
// model to the curve points; fit_calibration() re-derives an equivalent set.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "magsling/dynamics.hpp"

namespace magsling::dynamics {

struct Calibration {
    std::string name;
    PayloadSpec payload;
    FlightCondition flight;
    double damping_ratio = 0.0;
    double a_final_fraction = 0.05; ///< settle band used for settling times
    std::optional<double> length_m; ///< preferred tether length, when the set names one

    TetherSpec tether(double tether_length_m) const {
        return {tether_length_m, damping_ratio};
    }
};

/// Published trade-off curves: amplitude and settling time vs tether length,
/// plus the recommended-selection zone.
struct ReferenceCurves {
    std::vector<double> lengths_m;
    std::vector<double> amplitudes_m;
    std::vector<double> settlings_s;
    double select_zone_min_m = 0.0;
    double select_zone_max_m = 0.0;
};

/// The parameter set shipped with the toolkit (same values as
/// data/fig4_calibration.json).
Calibration builtin_fig4_calibration();

/// The curve points the shipped calibration was fitted to (same values as
/// data/fig4_reference_curves.json).
ReferenceCurves builtin_fig4_reference_curves();

Calibration load_calibration(const std::filesystem::path& json_path);
std::string calibration_to_json(const Calibration& c);

/// Least-squares re-derivation of a calibration from reference curves.
/// Minimizes the worst relative error of the closed-form amplitude and
/// settling predictions over the curve points (Nelder-Mead, multi-start,
/// deterministic). The returned set is not necessarily identical to the
/// shipped one but must reproduce the curves to comparable accuracy.
Calibration fit_calibration(const ReferenceCurves& curves, double mass_kg = 3.0);

/// Worst |relative error| of the calibration's predictions against the curves.
double calibration_max_curve_error(const Calibration& c, const ReferenceCurves& curves);

} // namespace magsling::dynamics

// Survey-platform economics: per-day and per-line-km cost metrics derived
// from platform parameters, and multi-platform comparison tables with the
// favorable value flagged per metric.
//
// Two speeds are carried per platform because the source derivations use a
// cruise speed for the cost chain and a (different) effective coverage speed
// for area and time-per-km; reconciling them silently would change the
// published numbers.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace magsling::economics {

struct PlatformSpec {
    std::string name;
    double aircraft_cost_usd = 0.0;
    double flight_duration_h = 0.0;  ///< per-flight endurance
    double cruise_speed_kmh = 0.0;   ///< used for distance/cost metrics
    double coverage_speed_kmh = 0.0; ///< used for coverage area and time-per-km
    double swath_width_km = 0.0;     ///< effective covered width per pass
    double line_spacing_m = 0.0;     ///< typical survey line spacing
    double daily_ops_cost_usd = 0.0;
    int safety_score = 0;            ///< 1..10, higher is safer
    double workday_h = 8.0;

    void validate() const;
};

struct MetricsRow {
    double flights_per_day = 0.0;        ///< workday / duration
    double ops_cost_per_flight_usd = 0.0; ///< daily ops / flights per day
    double distance_per_flight_km = 0.0; ///< duration * cruise speed
    double cost_per_line_km_usd = 0.0;   ///< cost per flight / distance per flight
    double coverage_area_km2 = 0.0;      ///< swath * duration * coverage speed
    double flight_time_per_km_s = 0.0;   ///< 3600 / coverage speed
};

MetricsRow derived_metrics(const PlatformSpec& p);

/// Which of a row's values are the favorable extremum across the comparison
/// (cost/time metrics: minimum; capability metrics: maximum). Ties flag all
/// tied rows.
struct BestFlags {
    bool aircraft_cost = false;
    bool flight_duration = false;
    bool safety = false;
    bool coverage_area = false;
    bool line_spacing = false;
    bool cost_per_line_km = false;
    bool flight_time_per_km = false;
    bool daily_ops_cost = false;
};

struct ComparisonRow {
    PlatformSpec platform;
    MetricsRow metrics;
    BestFlags best;
};

std::vector<ComparisonRow> compare_platforms(std::span<const PlatformSpec> platforms);

/// The four bundled reference platforms (same values as
/// data/default_platforms.json).
std::vector<PlatformSpec> default_platforms();

std::vector<PlatformSpec> load_platforms(const std::filesystem::path& json_path);

} // namespace magsling::economics

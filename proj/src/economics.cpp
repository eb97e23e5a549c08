#include "magsling/economics.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::economics {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError("economics: " + msg);
}

} // namespace

void PlatformSpec::validate() const {
    require(!name.empty(), "platform name must not be empty");
    require(aircraft_cost_usd >= 0.0, name + ": aircraft_cost_usd must be >= 0");
    require(flight_duration_h > 0.0, name + ": flight_duration_h must be > 0");
    require(cruise_speed_kmh > 0.0, name + ": cruise_speed_kmh must be > 0");
    require(coverage_speed_kmh > 0.0, name + ": coverage_speed_kmh must be > 0");
    require(swath_width_km > 0.0, name + ": swath_width_km must be > 0");
    require(line_spacing_m > 0.0, name + ": line_spacing_m must be > 0");
    require(daily_ops_cost_usd > 0.0, name + ": daily_ops_cost_usd must be > 0");
    require(safety_score >= 1 && safety_score <= 10, name + ": safety_score must be 1..10");
    require(workday_h > 0.0, name + ": workday_h must be > 0");
}

MetricsRow derived_metrics(const PlatformSpec& p) {
    p.validate();
    MetricsRow m;
    m.flights_per_day = p.workday_h / p.flight_duration_h;
    m.ops_cost_per_flight_usd = p.daily_ops_cost_usd / m.flights_per_day;
    m.distance_per_flight_km = p.flight_duration_h * p.cruise_speed_kmh;
    m.cost_per_line_km_usd = m.ops_cost_per_flight_usd / m.distance_per_flight_km;
    m.coverage_area_km2 = p.swath_width_km * p.flight_duration_h * p.coverage_speed_kmh;
    m.flight_time_per_km_s = 3600.0 / p.coverage_speed_kmh;
    return m;
}

std::vector<ComparisonRow> compare_platforms(std::span<const PlatformSpec> platforms) {
    require(!platforms.empty(), "comparison needs at least one platform");
    std::vector<ComparisonRow> rows;
    rows.reserve(platforms.size());
    for (const PlatformSpec& p : platforms) rows.push_back({p, derived_metrics(p), {}});

    // Flag every row matching the favorable extremum of each metric.
    auto flag = [&](auto value_of, auto flag_member, bool minimize) {
        double best = minimize ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
        for (const ComparisonRow& r : rows) {
            const double v = value_of(r);
            best = minimize ? std::min(best, v) : std::max(best, v);
        }
        for (ComparisonRow& r : rows) {
            if (value_of(r) == best) r.best.*flag_member = true;
        }
    };
    flag([](const ComparisonRow& r) { return r.platform.aircraft_cost_usd; },
         &BestFlags::aircraft_cost, true);
    flag([](const ComparisonRow& r) { return r.platform.flight_duration_h; },
         &BestFlags::flight_duration, false);
    flag([](const ComparisonRow& r) { return static_cast<double>(r.platform.safety_score); },
         &BestFlags::safety, false);
    flag([](const ComparisonRow& r) { return r.metrics.coverage_area_km2; },
         &BestFlags::coverage_area, false);
    flag([](const ComparisonRow& r) { return r.platform.line_spacing_m; },
         &BestFlags::line_spacing, true);
    flag([](const ComparisonRow& r) { return r.metrics.cost_per_line_km_usd; },
         &BestFlags::cost_per_line_km, true);
    flag([](const ComparisonRow& r) { return r.metrics.flight_time_per_km_s; },
         &BestFlags::flight_time_per_km, true);
    flag([](const ComparisonRow& r) { return r.platform.daily_ops_cost_usd; },
         &BestFlags::daily_ops_cost, true);
    return rows;
}

std::vector<PlatformSpec> default_platforms() {
    // Swath widths back out of the published coverage areas (coverage =
    // swath * duration * coverage speed); coverage speeds back out of the
    // published flight times per km.
    std::vector<PlatformSpec> v;
    v.push_back({"Generic UAV", 20000.0, 0.5, 45.0, 40.0, 0.025, 50.0, 500.0, 10, 8.0});
    v.push_back({"VTOL FW UAV", 17000.0, 3.0, 80.0, 80.0, 5.9 / (3.0 * 80.0), 50.0, 500.0, 10,
                 8.0});
    v.push_back({"Fixed Wing (Crewed)", 1500000.0, 6.0, 200.0, 200.0, 60.0 / (6.0 * 200.0),
                 100.0, 8000.0, 8, 8.0});
    v.push_back({"Helicopter (Crewed)", 2100000.0, 3.0, 150.0, 3600.0 / 35.0,
                 15.0 / (3.0 * 3600.0 / 35.0), 100.0, 12000.0, 7, 8.0});
    return v;
}

std::vector<PlatformSpec> load_platforms(const std::filesystem::path& json_path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(json_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("platforms: " + json_path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw ParseError("platforms: expected a JSON array of platform objects");
    std::vector<PlatformSpec> out;
    for (const auto& item : j) {
        PlatformSpec p;
        try {
            p.name = item.at("name").get<std::string>();
            p.aircraft_cost_usd = item.at("aircraft_cost_usd").get<double>();
            p.flight_duration_h = item.at("flight_duration_h").get<double>();
            p.cruise_speed_kmh = item.at("cruise_speed_kmh").get<double>();
            p.coverage_speed_kmh = item.at("coverage_speed_kmh").get<double>();
            p.swath_width_km = item.at("swath_width_km").get<double>();
            p.line_spacing_m = item.at("line_spacing_m").get<double>();
            p.daily_ops_cost_usd = item.at("daily_ops_cost_usd").get<double>();
            p.safety_score = item.at("safety_score").get<int>();
            p.workday_h = item.value("workday_h", 8.0);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("platforms: " + json_path.string() + ": " + e.what());
        }
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace magsling::economics

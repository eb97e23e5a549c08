#include <cmath>
#include <random>

#include <doctest.h>

#include "magsling/economics.hpp"
#include "magsling/errors.hpp"

using namespace magsling;
using namespace magsling::economics;

namespace {

PlatformSpec generic_uav() {
    return {"Generic UAV", 20000.0, 0.5, 45.0, 40.0, 0.025, 50.0, 500.0, 10, 8.0};
}

} // namespace

TEST_SUITE_BEGIN("economics");

TEST_CASE("golden chain: the worked small-UAV example") {
    const MetricsRow m = derived_metrics(generic_uav());
    CHECK(m.flights_per_day == 16.0);
    CHECK(m.ops_cost_per_flight_usd == 31.25);
    CHECK(m.distance_per_flight_km == 22.5);
    CHECK(m.coverage_area_km2 == 0.5);
    CHECK(m.flight_time_per_km_s == 90.0);
    CHECK(m.cost_per_line_km_usd == doctest::Approx(1.389).epsilon(1e-3));
    CHECK(std::abs(m.cost_per_line_km_usd - 1.38) <= 0.02); // published rounding
}

TEST_CASE("golden chain: the VTOL row at its inferred 80 km/h") {
    const PlatformSpec vtol = default_platforms()[1];
    CHECK(vtol.cruise_speed_kmh == 80.0);
    const MetricsRow m = derived_metrics(vtol);
    CHECK(std::abs(m.cost_per_line_km_usd - 0.78) <= 0.01);
    CHECK(m.flight_time_per_km_s == 45.0);
}

TEST_CASE("a flight lasting the whole workday costs the whole day's ops") {
    PlatformSpec p = generic_uav();
    p.flight_duration_h = p.workday_h;
    const MetricsRow m = derived_metrics(p);
    CHECK(m.flights_per_day == 1.0);
    CHECK(m.ops_cost_per_flight_usd == p.daily_ops_cost_usd);
}

TEST_CASE("cost per line km agrees with the direct algebraic route") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dur(0.2, 8.0), spd(20.0, 300.0), ops(100.0, 20000.0);
    for (int i = 0; i < 100; ++i) {
        PlatformSpec p = generic_uav();
        p.flight_duration_h = dur(rng);
        p.cruise_speed_kmh = spd(rng);
        p.daily_ops_cost_usd = ops(rng);
        const MetricsRow m = derived_metrics(p);
        const double direct =
            p.daily_ops_cost_usd / (m.flights_per_day * p.flight_duration_h * p.cruise_speed_kmh);
        CHECK(m.cost_per_line_km_usd == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("doubling daily ops cost doubles exactly the cost metrics and nothing else") {
    PlatformSpec p = generic_uav();
    const MetricsRow before = derived_metrics(p);
    p.daily_ops_cost_usd *= 2.0;
    const MetricsRow after = derived_metrics(p);
    CHECK(after.ops_cost_per_flight_usd == 2.0 * before.ops_cost_per_flight_usd);
    CHECK(after.cost_per_line_km_usd == 2.0 * before.cost_per_line_km_usd);
    CHECK(after.flights_per_day == before.flights_per_day);
    CHECK(after.distance_per_flight_km == before.distance_per_flight_km);
    CHECK(after.coverage_area_km2 == before.coverage_area_km2);
    CHECK(after.flight_time_per_km_s == before.flight_time_per_km_s);
}

TEST_CASE("time per km times coverage speed is the hour") {
    for (const PlatformSpec& p : default_platforms()) {
        const MetricsRow m = derived_metrics(p);
        CHECK(m.flight_time_per_km_s * p.coverage_speed_kmh ==
              doctest::Approx(3600.0).epsilon(1e-14));
    }
}

TEST_CASE("comparison: reference platforms flag the published favorites") {
    const auto rows = compare_platforms(default_platforms());
    REQUIRE(rows.size() == 4);
    const auto& uav = rows[0];
    const auto& vtol = rows[1];
    const auto& fw = rows[2];
    const auto& heli = rows[3];

    CHECK(vtol.best.cost_per_line_km);
    CHECK_FALSE(uav.best.cost_per_line_km);
    CHECK(vtol.best.aircraft_cost);
    CHECK(fw.best.flight_duration);
    CHECK(fw.best.coverage_area);
    CHECK(fw.best.flight_time_per_km);
    // published table highlights both UAVs on safety, spacing and ops cost
    CHECK(uav.best.safety);
    CHECK(vtol.best.safety);
    CHECK_FALSE(fw.best.safety);
    CHECK(uav.best.line_spacing);
    CHECK(vtol.best.line_spacing);
    CHECK(uav.best.daily_ops_cost);
    CHECK(vtol.best.daily_ops_cost);
    CHECK_FALSE(heli.best.daily_ops_cost);
}

TEST_CASE("comparison: a single platform is best at everything") {
    const auto rows = compare_platforms(std::vector<PlatformSpec>{generic_uav()});
    REQUIRE(rows.size() == 1);
    const BestFlags& b = rows[0].best;
    CHECK(b.aircraft_cost);
    CHECK(b.flight_duration);
    CHECK(b.safety);
    CHECK(b.coverage_area);
    CHECK(b.line_spacing);
    CHECK(b.cost_per_line_km);
    CHECK(b.flight_time_per_km);
    CHECK(b.daily_ops_cost);
}

TEST_CASE("comparison: identical platforms tie on every flag") {
    const std::vector<PlatformSpec> pair{generic_uav(), generic_uav()};
    const auto rows = compare_platforms(pair);
    for (const auto& r : rows) {
        CHECK(r.best.aircraft_cost);
        CHECK(r.best.flight_duration);
        CHECK(r.best.safety);
        CHECK(r.best.coverage_area);
        CHECK(r.best.line_spacing);
        CHECK(r.best.cost_per_line_km);
        CHECK(r.best.flight_time_per_km);
        CHECK(r.best.daily_ops_cost);
    }
}

TEST_CASE("validation: zero duration or speed are domain errors") {
    PlatformSpec p = generic_uav();
    p.flight_duration_h = 0.0;
    CHECK_THROWS_AS(derived_metrics(p), DomainError);
    p = generic_uav();
    p.cruise_speed_kmh = 0.0;
    CHECK_THROWS_AS(derived_metrics(p), DomainError);
    p = generic_uav();
    p.safety_score = 11;
    CHECK_THROWS_AS(derived_metrics(p), DomainError);
}

TEST_CASE("bundled platform JSON matches the built-in defaults") {
    const auto file = load_platforms(std::string(MAGSLING_DATA_DIR) +
                                     "/default_platforms.json");
    const auto builtin = default_platforms();
    REQUIRE(file.size() == builtin.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].name == builtin[i].name);
        CHECK(file[i].aircraft_cost_usd == builtin[i].aircraft_cost_usd);
        CHECK(file[i].flight_duration_h == builtin[i].flight_duration_h);
        CHECK(file[i].cruise_speed_kmh == builtin[i].cruise_speed_kmh);
        CHECK(file[i].coverage_speed_kmh == builtin[i].coverage_speed_kmh);
        CHECK(file[i].swath_width_km == builtin[i].swath_width_km);
        CHECK(file[i].line_spacing_m == builtin[i].line_spacing_m);
        CHECK(file[i].daily_ops_cost_usd == builtin[i].daily_ops_cost_usd);
        CHECK(file[i].safety_score == builtin[i].safety_score);
        CHECK(file[i].workday_h == builtin[i].workday_h);
    }
}

TEST_SUITE_END();

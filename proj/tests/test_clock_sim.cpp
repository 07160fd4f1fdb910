#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "otasync/clock_sim.hpp"

using namespace otasync;

namespace {

SimConfig zero_error_sim(double period_ms, double theta_ppm = 10.0) {
    SimConfig cfg;
    cfg.theta_ppm = theta_ppm;
    cfg.sync_period_ms = period_ms;
    cfg.duration_ms = 600.0;
    cfg.errors = zero_error_config();
    return cfg;
}

}  // namespace

TEST_CASE("advance") {
    CHECK(advance(0.0, 10.0, 1.0) == 10.0);
    CHECK(advance(123.0, 0.0, 5.0) == 123.0);
    double x = 0.0;
    for (int i = 0; i < 60; ++i) x = advance(x, 10.0, 1.0);
    CHECK(x == doctest::Approx(600.0));
}

TEST_CASE("apply sync") {
    CHECK(apply_sync(500.0, SyncErrorSample{}) == 0.0);
    SyncErrorSample s;
    s.tae_ns = 40.0;
    s.total_ns = 40.0;
    CHECK(apply_sync(-77.0, s) == 40.0);
}

TEST_CASE("zero-error max equals drift times period") {
    for (double period : {1.0, 10.0, 60.0, 120.0, 150.0}) {
        CAPTURE(period);
        const auto cfg = zero_error_sim(period);
        const double expect = cfg.theta_ppm * period;
        CHECK(simulate(cfg).max_abs_x_td_ns() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(simulate_max_abs(cfg).max_abs_x_td_ns == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(simulate(zero_error_sim(60.0)).max_abs_x_td_ns() < 1000.0);
    CHECK(simulate(zero_error_sim(120.0)).max_abs_x_td_ns() > 1000.0);
}

TEST_CASE("trace layout") {
    SimConfig cfg;
    cfg.sync_period_ms = 60.0;
    cfg.duration_ms = 600.0;
    cfg.tick_ms = 1.0;
    const Trace t = simulate(cfg);
    REQUIRE(t.points.size() == 601);
    CHECK(t.syncs.size() == 11);
    CHECK(t.points.front().t_ms == 0.0);
    CHECK(t.points.back().t_ms == 600.0);
    CHECK(t.points.front().x_td_ns == t.syncs.front().post_ns);
    CHECK_FALSE(t.syncs.front().pre_ns.has_value());
    int sync_rows = 0;
    for (const auto& p : t.points) sync_rows += p.is_sync ? 1 : 0;
    CHECK(sync_rows == 11);  // t = 0 included
    // Sync rows carry the top of the ramp.
    CHECK(t.points[60].is_sync);
    CHECK(t.points[60].x_td_ns == doctest::Approx(t.syncs[0].post_ns + 600.0));
    CHECK(*t.syncs[1].pre_ns == t.points[60].x_td_ns);
    CHECK(t.points[61].x_td_ns == doctest::Approx(t.syncs[1].post_ns + 10.0));
}

TEST_CASE("zero drift gives flat segments") {
    SimConfig cfg;
    cfg.theta_ppm = 0.0;
    cfg.sync_period_ms = 10.0;
    cfg.duration_ms = 100.0;
    const Trace t = simulate(cfg);
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        if (t.points[i - 1].is_sync) continue;
        CHECK(t.points[i].x_td_ns == t.points[i - 1].x_td_ns);
    }
}

TEST_CASE("same seed twice gives identical traces") {
    SimConfig cfg;
    cfg.seed = 17;
    const Trace a = simulate(cfg);
    const Trace b = simulate(cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) REQUIRE(a.points[i].x_td_ns == b.points[i].x_td_ns);
    cfg.seed = 18;
    CHECK(simulate(cfg).points.front().x_td_ns != a.points.front().x_td_ns);
}

TEST_CASE("closed-form maximum equals the trace maximum") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (double period : {1.0, 7.0, 60.0, 150.0}) {
            SimConfig cfg;
            cfg.seed = seed;
            cfg.sync_period_ms = period;
            cfg.duration_ms = 10.0 * period;
            cfg.numerology = nr::make_numerology(static_cast<int>(seed % 4));
            const Trace t = simulate(cfg);
            const RunMaximum m = simulate_max_abs(cfg);
            REQUIRE(m.max_abs_x_td_ns == doctest::Approx(t.max_abs_x_td_ns()).epsilon(1e-12));
            REQUIRE(m.sync_count == t.syncs.size());
        }
    }
}

TEST_CASE("sim config validation") {
    SimConfig cfg;
    cfg.sync_period_ms = 0.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = SimConfig{};
    cfg.tick_ms = 100.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = SimConfig{};
    cfg.duration_ms = 30.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = SimConfig{};
    cfg.tick_ms = 0.7;
    CHECK_THROWS_AS(simulate(cfg), ValidationError);
    cfg = SimConfig{};
    cfg.tick_ms = 1e-6;
    cfg.duration_ms = 1e5;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    CHECK(SimConfig{}.effective_tick_ms() == 1.0);
    cfg = SimConfig{};
    cfg.sync_period_ms = 2.0;
    CHECK(cfg.effective_tick_ms() == doctest::Approx(0.2));
}

TEST_CASE("trace serialization") {
    SimConfig cfg;
    cfg.sync_period_ms = 10.0;
    cfg.duration_ms = 20.0;
    const Trace t = simulate(cfg);
    std::ostringstream os;
    write_trace_csv(os, t);
    const std::string csv = os.str();
    CHECK(csv.rfind("t_ms,x_td_ns,is_sync\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(t.points.size() + 1));
    const auto j = trace_to_json(t);
    CHECK(j["points"].size() == t.points.size());
    CHECK(j["syncs"].size() == t.syncs.size());
    CHECK(j["max_abs_x_td_ns"].get<double>() == t.max_abs_x_td_ns());
}

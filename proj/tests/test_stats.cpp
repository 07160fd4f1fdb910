#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "otasync/rng.hpp"
#include "otasync/stats.hpp"

using namespace otasync;

namespace {

// Full sort, then the ceil(q * n)-th smallest.
double sorted_rank(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

}  // namespace

TEST_CASE("summary of a symmetric pair") {
    const std::vector<double> v{1.0, -1.0};
    const auto s = stats::summarize(v);
    CHECK(s.abs_mean_ns == 1.0);
    CHECK(s.mean_ns == 0.0);
    CHECK(s.max_abs_ns == 1.0);
    CHECK(s.count == 2);
    CHECK(s.mean_magnitude_ns() == 0.0);
}

TEST_CASE("summary errors") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(stats::summarize(empty), std::domain_error);
    const std::vector<double> v{1.0, 2.0};
    const std::vector<double> bad_q{1.5};
    CHECK_THROWS_AS(stats::summarize(v, bad_q), std::domain_error);
    CHECK_THROWS_AS(stats::percentile(v, 0.0), std::domain_error);
    CHECK_THROWS_AS(stats::percentile(empty, 0.5), std::domain_error);
    CHECK_THROWS_AS(stats::empirical_cdf(empty, v), std::domain_error);
    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(stats::empirical_cdf(v, unsorted), std::domain_error);
}

TEST_CASE("nearest-rank percentile") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[i] = 100 - i;
    CHECK(stats::percentile(v, 0.5) == 50.0);
    CHECK(stats::percentile(v, 0.01) == 1.0);
    CHECK(stats::percentile(v, 0.999) == 100.0);
    CHECK_THROWS_AS(stats::percentile(v, 1.0), std::domain_error);
}

TEST_CASE("percentile equals the full-sort oracle") {
    Rng rng(4);
    for (std::size_t n : {1u, 2u, 3u, 17u, 100u, 1000u, 10'000u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = std::round(rng.uniform(-50.0, 50.0) * 4.0) / 4.0;  // with ties
        for (double q : {1e-6, 0.1, 0.25, 0.5, 0.9, 0.99, 0.999, 0.99999}) {
            CAPTURE(n);
            CAPTURE(q);
            REQUIRE(stats::percentile(v, q) == sorted_rank(v, q));
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end());
            REQUIRE(stats::percentile_sorted(sorted, q) == sorted_rank(v, q));
        }
        const std::vector<double> qs{0.5, 0.99};
        const auto s = stats::summarize(v, qs);
        CHECK(s.percentiles.at(0.5) == sorted_rank(v, 0.5));
        CHECK(s.percentiles.at(0.99) == sorted_rank(v, 0.99));
    }
}

TEST_CASE("percentile is monotone in q") {
    Rng rng(5);
    std::vector<double> v(2000);
    for (auto& x : v) x = rng.standard_normal();
    double prev = stats::percentile(v, 0.0005);
    for (double q = 0.001; q < 1.0; q += 0.0137) {
        const double cur = stats::percentile(v, q);
        REQUIRE(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("gaussian 99.9th percentile") {
    Rng rng(123);
    std::vector<double> v(1'000'000);
    for (auto& x : v) x = rng.standard_normal();
    CHECK(std::fabs(stats::percentile(v, 0.999) - 3.090) < 0.05);
}

TEST_CASE("empirical cdf") {
    const std::vector<double> constant(50, 3.0);
    const std::vector<double> grid{0.0, 2.999, 3.0, 10.0};
    const auto cdf = stats::empirical_cdf(constant, grid);
    REQUIRE(cdf.size() == 4);
    CHECK(cdf[0].probability == 0.0);
    CHECK(cdf[1].probability == 0.0);
    CHECK(cdf[2].probability == 1.0);
    CHECK(cdf[3].probability == 1.0);

    Rng rng(9);
    std::vector<double> v(5000);
    for (auto& x : v) x = rng.uniform(0.0, 1.0);
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
    const auto c = stats::empirical_cdf(v, g);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto below = std::count_if(v.begin(), v.end(), [&](double x) { return x <= g[i]; });
        CHECK(c[i].probability == static_cast<double>(below) / v.size());
        if (i > 0) CHECK(c[i].probability >= c[i - 1].probability);
    }
}

TEST_CASE("compensated sum and folding") {
    std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    CHECK(stats::compensated_sum(v) == 2.0);
    const std::vector<double> w{-2.0, 3.0};
    const auto f = stats::folded(w);
    CHECK(f == std::vector<double>{2.0, 3.0});
}

TEST_CASE("stats serialization") {
    const std::vector<double> v{1.0, -3.0};
    const std::vector<double> qs{0.5};
    const auto j = stats::to_json(stats::summarize(v, qs));
    CHECK(j["max_abs_ns"].get<double>() == 3.0);
    CHECK(j["mean_ns"].get<double>() == -1.0);
    std::ostringstream os;
    const std::vector<double> grid{0.0, 5.0};
    stats::write_cdf_csv(os, stats::empirical_cdf(v, grid));
    CHECK(os.str().rfind("value_ns,probability\n", 0) == 0);
}

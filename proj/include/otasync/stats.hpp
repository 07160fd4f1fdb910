// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

namespace otasync::stats {

struct SummaryStats {
    double abs_mean_ns{0.0};
    double mean_ns{0.0};  // signed
    double max_abs_ns{0.0};
    std::size_t count{0};
    std::map<double, double> percentiles;  // quantile -> value, nearest rank

    double mean_magnitude_ns() const;
};

/// Throws std::domain_error on empty input or a quantile outside (0, 1).
SummaryStats summarize(std::span<const double> samples,
                       std::span<const double> quantiles = {});

/// Nearest-rank quantile: the ceil(q * n)-th smallest sample.
double percentile(std::span<const double> samples, double q);

/// Same as percentile() on input already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double q);

struct CdfPoint {
    double value_ns{0.0};
    double probability{0.0};  // P(X <= value)
};

/// Right-continuous empirical CDF evaluated on an ascending grid.
std::vector<CdfPoint> empirical_cdf(std::span<const double> samples,
                                    std::span<const double> grid);

/// |x| for each sample.
std::vector<double> folded(std::span<const double> samples);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

nlohmann::json to_json(const SummaryStats& s);
nlohmann::json to_json(const std::vector<CdfPoint>& cdf);

/// `value_ns,probability` with a header row.
void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf);

}  // namespace otasync::stats

// SPDX-License-Identifier: Apache-2.0

#include "otasync/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace otasync::stats {

namespace {

void require_nonempty(std::span<const double> samples) {
    if (samples.empty()) {
        throw std::domain_error("statistics need at least one sample");
    }
}

std::size_t nearest_rank_index(std::size_t n, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::domain_error(fmt::format("quantile {} outside (0, 1)", q));
    }
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return std::clamp<std::size_t>(rank, 1, n) - 1;
}

}  // namespace

double SummaryStats::mean_magnitude_ns() const { return std::fabs(mean_ns); }

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double c = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

std::vector<double> folded(std::span<const double> samples) {
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(),
                   [](double v) { return std::fabs(v); });
    return out;
}

SummaryStats summarize(std::span<const double> samples, std::span<const double> quantiles) {
    require_nonempty(samples);
    SummaryStats s;
    s.count = samples.size();
    const auto abs_values = folded(samples);
    const double n = static_cast<double>(s.count);
    s.mean_ns = compensated_sum(samples) / n;
    s.abs_mean_ns = compensated_sum(abs_values) / n;
    s.max_abs_ns = *std::max_element(abs_values.begin(), abs_values.end());
    if (!quantiles.empty()) {
        std::vector<double> sorted(samples.begin(), samples.end());
        std::sort(sorted.begin(), sorted.end());
        for (const double q : quantiles) {
            s.percentiles[q] = percentile_sorted(sorted, q);
        }
    }
    return s;
}

double percentile_sorted(std::span<const double> sorted, double q) {
    require_nonempty(sorted);
    return sorted[nearest_rank_index(sorted.size(), q)];
}

double percentile(std::span<const double> samples, double q) {
    require_nonempty(samples);
    const std::size_t idx = nearest_rank_index(samples.size(), q);
    std::vector<double> work(samples.begin(), samples.end());
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(idx), work.end());
    return work[idx];
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples, std::span<const double> grid) {
    require_nonempty(samples);
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::domain_error("CDF grid must be sorted ascending");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    std::vector<CdfPoint> out;
    out.reserve(grid.size());
    auto it = sorted.begin();
    for (const double v : grid) {
        it = std::upper_bound(it, sorted.end(), v);
        out.push_back(CdfPoint{v, static_cast<double>(it - sorted.begin()) / n});
    }
    return out;
}

nlohmann::json to_json(const SummaryStats& s) {
    nlohmann::json pct = nlohmann::json::array();
    for (const auto& [q, v] : s.percentiles) {
        pct.push_back({{"q", q}, {"value_ns", v}});
    }
    return {
        {"count", s.count},
        {"abs_mean_ns", s.abs_mean_ns},
        {"mean_ns", s.mean_ns},
        {"mean_magnitude_ns", s.mean_magnitude_ns()},
        {"max_abs_ns", s.max_abs_ns},
        {"percentiles", std::move(pct)},
    };
}

nlohmann::json to_json(const std::vector<CdfPoint>& cdf) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : cdf) out.push_back({p.value_ns, p.probability});
    return out;
}

void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf) {
    os << "value_ns,probability\n";
    for (const auto& p : cdf) os << fmt::format("{},{}\n", p.value_ns, p.probability);
}

}  // namespace otasync::stats

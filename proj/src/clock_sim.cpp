// SPDX-License-Identifier: Apache-2.0

#include "otasync/clock_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace otasync {

namespace {

struct TickPlan {
    double tick_ms;
    std::int64_t ticks_per_period;
    std::int64_t total_ticks;
};

std::int64_t whole_ticks(double span_ms, double tick_ms, const char* what) {
    const double ratio = span_ms / tick_ms;
    const double nearest = std::round(ratio);
    if (std::fabs(ratio - nearest) > 1e-9 * std::fmax(1.0, nearest)) {
        throw ValidationError(fmt::format("{} ({} ms) is not a whole number of ticks ({} ms)",
                                          what, span_ms, tick_ms));
    }
    return static_cast<std::int64_t>(nearest);
}

TickPlan plan(const SimConfig& cfg) {
    validate(cfg);
    const double tick = cfg.effective_tick_ms();
    return TickPlan{tick, whole_ticks(cfg.sync_period_ms, tick, "sync period"),
                    whole_ticks(cfg.duration_ms, tick, "duration")};
}

}  // namespace

double SimConfig::effective_tick_ms() const {
    return tick_ms ? *tick_ms : std::min(1.0, sync_period_ms / 10.0);
}

void validate(const SimConfig& cfg) {
    if (!std::isfinite(cfg.theta_ppm)) {
        throw ValidationError("theta must be finite");
    }
    if (!std::isfinite(cfg.sync_period_ms) || !(cfg.sync_period_ms > 0.0)) {
        throw ValidationError("sync period must be > 0 ms");
    }
    const double tick = cfg.effective_tick_ms();
    if (!std::isfinite(tick) || !(tick > 0.0)) {
        throw ValidationError("tick must be > 0 ms");
    }
    if (tick > cfg.sync_period_ms) {
        throw ValidationError("tick must not exceed the sync period");
    }
    if (!std::isfinite(cfg.duration_ms) || cfg.duration_ms < cfg.sync_period_ms) {
        throw ValidationError("duration must be at least one sync period");
    }
    // 1e8 ticks is about 2.4 GB of trace rows.
    if (cfg.duration_ms / tick > 1e8) {
        throw ValidationError("duration / tick exceeds 1e8 samples");
    }
    try {
        nr::validate(cfg.numerology);
    } catch (const std::domain_error& e) {
        throw ValidationError(e.what());
    }
    validate(cfg.errors);
}

double Trace::max_abs_x_td_ns() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, std::fabs(p.x_td_ns));
    for (const auto& s : syncs) m = std::max(m, std::fabs(s.post_ns));
    return m;
}

double advance(double x_td_ns, double theta_ppm, double tick_ms) {
    // ppm of one ms is 1e-6 * 1e6 ns.
    return x_td_ns + theta_ppm * tick_ms;
}

double apply_sync(double /*x_td_ns*/, const SyncErrorSample& sync_error) {
    return sync_error.total_ns;
}

Trace simulate(const SimConfig& cfg) {
    const TickPlan p = plan(cfg);
    Rng rng(derive_seed(cfg.seed, 0));

    Trace trace;
    trace.points.reserve(static_cast<std::size_t>(p.total_ticks) + 1);
    trace.syncs.reserve(static_cast<std::size_t>(p.total_ticks / p.ticks_per_period) + 1);

    auto sync_now = [&](double t_ms, std::optional<double> pre, double x) {
        const SyncErrorSample err = compose_sync_error(cfg.errors, cfg.numerology, rng);
        if (err.ta_saturated) ++trace.saturation_count;
        const double post = apply_sync(x, err);
        trace.syncs.push_back(SyncEvent{t_ms, pre, post, err});
        return post;
    };

    double x = sync_now(0.0, std::nullopt, 0.0);
    trace.points.push_back(TracePoint{0.0, x, true});
    for (std::int64_t i = 1; i <= p.total_ticks; ++i) {
        const double t = static_cast<double>(i) * p.tick_ms;
        x = advance(x, cfg.theta_ppm, p.tick_ms);
        const bool is_sync = i % p.ticks_per_period == 0;
        trace.points.push_back(TracePoint{t, x, is_sync});
        if (is_sync) {
            x = sync_now(t, x, x);
        }
    }
    return trace;
}

RunMaximum simulate_max_abs(const SimConfig& cfg) {
    const TickPlan p = plan(cfg);
    Rng rng(derive_seed(cfg.seed, 0));
    RunMaximum out;

    auto draw = [&] {
        const SyncErrorSample err = compose_sync_error(cfg.errors, cfg.numerology, rng);
        ++out.sync_count;
        if (err.ta_saturated) ++out.saturation_count;
        return err.total_ns;
    };
    // x_td is affine between syncs, so each interval peaks at an endpoint:
    // one tick after the reset or the last tick before the next reset.
    auto interval_peak = [&](double post, std::int64_t ticks) {
        const double first = post + cfg.theta_ppm * p.tick_ms;
        const double last = post + cfg.theta_ppm * p.tick_ms * static_cast<double>(ticks);
        return std::max({std::fabs(post), std::fabs(first), std::fabs(last)});
    };

    std::int64_t remaining = p.total_ticks;
    double post = draw();
    double m = std::fabs(post);
    while (remaining > 0) {
        const std::int64_t span = std::min(remaining, p.ticks_per_period);
        m = std::max(m, interval_peak(post, span));
        remaining -= span;
        if (span == p.ticks_per_period) {
            post = draw();
            m = std::max(m, std::fabs(post));
        }
    }
    out.max_abs_x_td_ns = m;
    return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << "t_ms,x_td_ns,is_sync\n";
    for (const auto& p : trace.points) {
        os << fmt::format("{},{},{}\n", p.t_ms, p.x_td_ns, p.is_sync ? 1 : 0);
    }
}

nlohmann::json trace_to_json(const Trace& trace) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : trace.points) {
        points.push_back({p.t_ms, p.x_td_ns, p.is_sync});
    }
    nlohmann::json syncs = nlohmann::json::array();
    for (const auto& s : trace.syncs) {
        syncs.push_back({
            {"t_ms", s.t_ms},
            {"pre_ns", s.pre_ns ? nlohmann::json(*s.pre_ns) : nlohmann::json(nullptr)},
            {"post_ns", s.post_ns},
            {"tae_ns", s.error.tae_ns},
            {"rtge_ns", s.error.rtge_ns},
            {"toa_ns", s.error.toa_ns},
            {"pd_residual_ns", s.error.pd_residual_ns},
            {"ta_saturated", s.error.ta_saturated},
        });
    }
    return {
        {"columns", {"t_ms", "x_td_ns", "is_sync"}},
        {"points", std::move(points)},
        {"syncs", std::move(syncs)},
        {"saturation_count", trace.saturation_count},
        {"max_abs_x_td_ns", trace.max_abs_x_td_ns()},
    };
}

}  // namespace otasync

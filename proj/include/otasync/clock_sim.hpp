// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "otasync/error_models.hpp"
#include "otasync/nr_timing.hpp"

namespace otasync {

struct SimConfig {
    double theta_ppm{10.0};
    double sync_period_ms{60.0};
    double duration_ms{600.0};
    std::optional<double> tick_ms{};  // unset: min(1 ms, period / 10)
    std::uint64_t seed{1};
    nr::Numerology numerology{};
    ErrorConfig errors{};

    double effective_tick_ms() const;
};

/// Throws ValidationError. Period and duration must be whole multiples of
/// the tick.
void validate(const SimConfig& cfg);

struct TracePoint {
    double t_ms{0.0};
    double x_td_ns{0.0};
    bool is_sync{false};
};

struct SyncEvent {
    double t_ms{0.0};
    std::optional<double> pre_ns{};  // end of the drift ramp; unset for t = 0
    double post_ns{0.0};             // value installed by the sync
    SyncErrorSample error{};
};

/// UE-minus-gNB time difference sampled once per tick.
///
/// A sync row holds the left limit of x_td at the sync instant, the top
/// of the ramp that the sync cuts off. The t = 0 row holds the initial
/// sync value. Values installed by each sync are in `syncs`.
struct Trace {
    std::vector<TracePoint> points;
    std::vector<SyncEvent> syncs;
    std::size_t saturation_count{0};

    /// Largest |x_td| over all rows and all post-sync values.
    double max_abs_x_td_ns() const;
};

/// One tick of free-running drift: theta ppm over tick_ms adds
/// theta * tick_ms ns (10 ppm is 10 ns per ms).
double advance(double x_td_ns, double theta_ppm, double tick_ms);

/// Memoryless reset: the time difference becomes the sync error.
double apply_sync(double x_td_ns, const SyncErrorSample& sync_error);

Trace simulate(const SimConfig& cfg);

/// Same sample stream as simulate(), evaluated per sync interval without
/// materialising the trace. Equals simulate(cfg).max_abs_x_td_ns().
struct RunMaximum {
    double max_abs_x_td_ns{0.0};
    std::size_t sync_count{0};
    std::size_t saturation_count{0};
};
RunMaximum simulate_max_abs(const SimConfig& cfg);

/// `t_ms,x_td_ns,is_sync` with a header row.
void write_trace_csv(std::ostream& os, const Trace& trace);

nlohmann::json trace_to_json(const Trace& trace);

}  // namespace otasync

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "otasync/nr_timing.hpp"
#include "otasync/rng.hpp"

namespace otasync {

/// Thrown for configuration values outside their documented range.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ToaModelKind { none, table_3gpp, gaussian };

struct ToaModel {
    ToaModelKind kind{ToaModelKind::gaussian};
    double kappa{2.0};  // gaussian only: sigma = U(mu) / kappa
};

enum class CorrectionKind {
    none,
    half_granularity,  // the "-sigma/2" field: +T_gran/2 on the PD estimate
    custom,
};

struct Correction {
    CorrectionKind kind{CorrectionKind::none};
    double custom_ns{0.0};  // added to the PD estimate when kind == custom
};

/// Reference time granularity G_R. `lo == hi` is a fixed granularity,
/// otherwise G_R is drawn uniformly from [lo, hi] per sync event.
struct GranularityRange {
    double lo_ns{10.0};
    double hi_ns{300.0};

    static GranularityRange fixed(double g_ns) { return {g_ns, g_ns}; }
    bool is_fixed() const { return lo_ns == hi_ns; }
};

struct ErrorConfig {
    double tae_bound_ns{65.0};
    GranularityRange rtge_granularity{};
    ToaModel toa{};
    Correction correction{};
    /// Ground-truth one-way delay; unset means default_true_pd_ns(numerology).
    std::optional<double> true_pd_ns{};
};

/// An ErrorConfig with every source switched off and an exact path delay.
ErrorConfig zero_error_config();

void validate(const ErrorConfig& cfg);

/// 10.37 TA steps: a point off the quantization lattice.
double default_true_pd_ns(const nr::Numerology& num);

double resolved_true_pd_ns(const ErrorConfig& cfg, const nr::Numerology& num);

struct SyncErrorSample {
    double tae_ns{0.0};
    double rtge_ns{0.0};
    double toa_ns{0.0};          // enters only through pd_residual_ns
    double pd_residual_ns{0.0};
    double total_ns{0.0};        // tae + rtge + pd_residual
    bool ta_saturated{false};
};

/// Uniform on [-bound, +bound].
double sample_tae(double bound_ns, Rng& rng);

/// Uniform on [-G_R/2, +G_R/2].
double sample_rtge(double g_r_ns, Rng& rng);

/// One draw of G_R; consumes a draw even when the range is fixed so that
/// sample streams stay aligned across configurations.
double sample_granularity(const GranularityRange& range, Rng& rng);

/// Half-width of the UE downlink timing error bound for the numerology.
double toa_bound_3gpp(const nr::Numerology& num);

/// U(mu) / kappa.
double toa_sigma(const nr::Numerology& num, double kappa);

/// Gaussian draws are truncated at this many sigma (rejected and redrawn).
inline constexpr double gaussian_truncation_sigmas = 6.0;

double sample_toa(const ToaModel& model, const nr::Numerology& num, Rng& rng);

/// Constant added to the PD estimate by the configured correction.
double correction_offset_ns(const Correction& corr, const nr::Numerology& num);

struct PdResidual {
    double residual_ns{0.0};
    double toa_ns{0.0};
    bool saturated{false};
};

/// TA-based path-delay estimation error for one sync event:
/// measured RTT = 2 * true_pd + ToA error, TA = floor(RTT / U),
/// estimate = TA * U / 2, residual = estimate - true_pd + correction.
/// An RTT outside the random-access index range is clamped and flagged.
PdResidual pd_estimation_residual(double true_pd_ns, const nr::Numerology& num,
                                  const ToaModel& toa, const Correction& corr, Rng& rng);

/// Draw order: TAE, G_R, RTGE, ToA.
SyncErrorSample compose_sync_error(const ErrorConfig& cfg, const nr::Numerology& num, Rng& rng);

}  // namespace otasync

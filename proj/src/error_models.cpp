// SPDX-License-Identifier: Apache-2.0

#include "otasync/error_models.hpp"

#include <cmath>
#include <string>

namespace otasync {

ErrorConfig zero_error_config() {
    ErrorConfig cfg;
    cfg.tae_bound_ns = 0.0;
    cfg.rtge_granularity = GranularityRange::fixed(0.0);
    cfg.toa = ToaModel{ToaModelKind::none, 2.0};
    cfg.correction = Correction{};
    cfg.true_pd_ns = 0.0;
    return cfg;
}

void validate(const ErrorConfig& cfg) {
    if (!std::isfinite(cfg.tae_bound_ns) || cfg.tae_bound_ns < 0.0) {
        throw ValidationError("TAE bound must be >= 0");
    }
    const auto& g = cfg.rtge_granularity;
    if (!std::isfinite(g.lo_ns) || !std::isfinite(g.hi_ns) || g.lo_ns < 0.0 || g.hi_ns < g.lo_ns) {
        throw ValidationError("granularity range must satisfy 0 <= lo <= hi");
    }
    if (cfg.toa.kind == ToaModelKind::gaussian &&
        (!std::isfinite(cfg.toa.kappa) || !(cfg.toa.kappa > 0.0))) {
        throw ValidationError("kappa must be > 0");
    }
    if (cfg.correction.kind == CorrectionKind::custom && !std::isfinite(cfg.correction.custom_ns)) {
        throw ValidationError("custom correction must be finite");
    }
    if (cfg.true_pd_ns && (!std::isfinite(*cfg.true_pd_ns) || *cfg.true_pd_ns < 0.0)) {
        throw ValidationError("true path delay must be >= 0");
    }
}

double default_true_pd_ns(const nr::Numerology& num) {
    return 10.37 * nr::ta_time_unit_ns(num);
}

double resolved_true_pd_ns(const ErrorConfig& cfg, const nr::Numerology& num) {
    return cfg.true_pd_ns ? *cfg.true_pd_ns : default_true_pd_ns(num);
}

double sample_tae(double bound_ns, Rng& rng) {
    return rng.uniform(-bound_ns, bound_ns);
}

double sample_rtge(double g_r_ns, Rng& rng) {
    return rng.uniform(-g_r_ns / 2.0, g_r_ns / 2.0);
}

double sample_granularity(const GranularityRange& range, Rng& rng) {
    const double g = rng.uniform(range.lo_ns, range.hi_ns);
    return range.is_fixed() ? range.lo_ns : g;
}

double toa_bound_3gpp(const nr::Numerology& num) {
    double steps = 0.0;
    switch (num.mu) {
        case 0: steps = 12.0; break;
        case 1: steps = 10.0; break;
        case 2: steps = 7.0; break;
        case 3: steps = 3.5; break;
        default:
            throw std::domain_error("no UE timing error bound for numerology " +
                                    std::to_string(num.mu));
    }
    return steps * 64.0 * num.t_c_ns();
}

double toa_sigma(const nr::Numerology& num, double kappa) {
    if (!(kappa > 0.0)) {
        throw std::domain_error("kappa must be > 0");
    }
    return nr::ta_time_unit_ns(num) / kappa;
}

double sample_toa(const ToaModel& model, const nr::Numerology& num, Rng& rng) {
    if (model.kind == ToaModelKind::none) {
        return 0.0;
    }
    if (model.kind == ToaModelKind::table_3gpp) {
        const double bound = toa_bound_3gpp(num);
        return rng.uniform(-bound, bound);
    }
    const double sigma = toa_sigma(num, model.kappa);
    double z = rng.standard_normal();
    while (std::fabs(z) > gaussian_truncation_sigmas) {
        z = rng.standard_normal();
    }
    return sigma * z;
}

double correction_offset_ns(const Correction& corr, const nr::Numerology& num) {
    switch (corr.kind) {
        case CorrectionKind::none: return 0.0;
        case CorrectionKind::half_granularity: return nr::ta_granularity_ns(num) / 2.0;
        case CorrectionKind::custom: return corr.custom_ns;
    }
    return 0.0;
}

PdResidual pd_estimation_residual(double true_pd_ns, const nr::Numerology& num,
                                  const ToaModel& toa, const Correction& corr, Rng& rng) {
    if (!(true_pd_ns >= 0.0)) {
        throw std::domain_error("true path delay must be >= 0");
    }
    PdResidual out;
    out.toa_ns = sample_toa(toa, num, rng);

    const double rtt = 2.0 * true_pd_ns + out.toa_ns;
    nr::TaCommand ta;
    if (rtt < 0.0) {
        ta = nr::TaCommand{nr::ta_random_access_min, nr::TaMode::random_access};
        out.saturated = true;
    } else {
        try {
            ta = nr::ta_index_for_rtt(rtt, num, nr::TaMode::random_access);
        } catch (const nr::TaSaturationError& e) {
            ta = e.clamped();
            out.saturated = true;
        }
    }
    const double estimate = nr::path_delay_estimate(nr::TaBasedInput{ta, num});
    out.residual_ns = estimate - true_pd_ns + correction_offset_ns(corr, num);
    return out;
}

SyncErrorSample compose_sync_error(const ErrorConfig& cfg, const nr::Numerology& num, Rng& rng) {
    SyncErrorSample s;
    s.tae_ns = sample_tae(cfg.tae_bound_ns, rng);
    s.rtge_ns = sample_rtge(sample_granularity(cfg.rtge_granularity, rng), rng);
    const auto pd = pd_estimation_residual(resolved_true_pd_ns(cfg, num), num, cfg.toa,
                                           cfg.correction, rng);
    s.toa_ns = pd.toa_ns;
    s.pd_residual_ns = pd.residual_ns;
    s.ta_saturated = pd.saturated;
    s.total_ns = s.tae_ns + s.rtge_ns + s.pd_residual_ns;
    return s;
}

}  // namespace otasync

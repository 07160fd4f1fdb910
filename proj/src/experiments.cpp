// SPDX-License-Identifier: Apache-2.0

#include "otasync/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace otasync::experiments {

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write into
/// slot i of a pre-sized vector, so results never depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string_view toa_kind_name(ToaModelKind kind) {
    switch (kind) {
        case ToaModelKind::none: return "none";
        case ToaModelKind::table_3gpp: return "table";
        case ToaModelKind::gaussian: return "gaussian";
    }
    return "?";
}

std::string_view correction_kind_name(CorrectionKind kind) {
    switch (kind) {
        case CorrectionKind::none: return "none";
        case CorrectionKind::half_granularity: return "auto";
        case CorrectionKind::custom: return "custom";
    }
    return "?";
}

/// Correction used for the "corrected" table1 rows.
Correction table1_correction(const ExperimentSpec& spec) {
    if (spec.errors.correction.kind == CorrectionKind::none) {
        return Correction{CorrectionKind::half_granularity, 0.0};
    }
    return spec.errors.correction;
}

nlohmann::json meta_block(const ExperimentSpec& spec, std::string_view id) {
    auto config = effective_config(spec);
    return {
        {"tool", "otasync"},
        {"version", tool_version},
        {"config_schema_version", config_schema_version},
        {"experiment", id},
        {"seed", spec.seed},
        {"sample_count", spec.sample_count},
        {"repetitions", spec.repetitions},
        {"config_hash", config_hash(config)},
        {"config", std::move(config)},
    };
}

}  // namespace

std::string_view to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::table1: return "table1";
        case ExperimentId::fig4: return "fig4";
        case ExperimentId::fig5: return "fig5";
        case ExperimentId::fig6: return "fig6";
        case ExperimentId::fig7: return "fig7";
        case ExperimentId::capacity: return "capacity";
    }
    return "?";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view name) {
    for (const auto id : all_experiments()) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

const std::vector<ExperimentId>& all_experiments() {
    static const std::vector<ExperimentId> ids{ExperimentId::table1, ExperimentId::fig4,
                                               ExperimentId::fig5,   ExperimentId::fig6,
                                               ExperimentId::fig7,   ExperimentId::capacity};
    return ids;
}

ExperimentSpec default_spec(ExperimentId id) {
    ExperimentSpec spec;
    spec.id = id;
    switch (id) {
        case ExperimentId::table1:
            break;
        case ExperimentId::fig4:
            spec.periods_ms = {60.0};
            break;
        case ExperimentId::fig5:
            spec.sample_count = 100'000;
            spec.errors.toa = ToaModel{ToaModelKind::table_3gpp, 2.0};
            spec.granularity_points = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
            break;
        case ExperimentId::fig6:
            spec.scs_khz = {15};
            spec.periods_ms = {60.0, 120.0};
            spec.duration_ms = 600.0;
            spec.tick_ms = 1.0;
            break;
        case ExperimentId::fig7:
            spec.periods_ms = {1.0, 2.0, 5.0};
            for (int p = 10; p <= 150; p += 10) spec.periods_ms.push_back(p);
            break;
        case ExperimentId::capacity:
            break;
    }
    return spec;
}

nr::Numerology numerology_for(const ExperimentSpec& spec, int scs_khz) {
    nr::Numerology num = nr::numerology_for_scs(scs_khz);
    num.n_tafo = spec.n_tafo;
    num.legacy_nta_scaling = spec.legacy_nta_scaling;
    nr::validate(num);
    return num;
}

void validate(const ExperimentSpec& spec) {
    if (spec.scs_khz.empty()) throw ValidationError("at least one SCS is required");
    for (const int scs : spec.scs_khz) {
        try {
            numerology_for(spec, scs);
        } catch (const std::domain_error& e) {
            throw ValidationError(e.what());
        }
    }
    validate(spec.errors);
    if (!std::isfinite(spec.theta_ppm)) throw ValidationError("theta must be finite");
    for (const double k : spec.kappas) {
        if (!std::isfinite(k) || !(k > 0.0)) throw ValidationError("kappa must be > 0");
    }
    for (const double p : spec.periods_ms) {
        if (!std::isfinite(p) || !(p > 0.0)) throw ValidationError("sync period must be > 0 ms");
    }
    if (spec.tick_ms && !(*spec.tick_ms > 0.0)) throw ValidationError("tick must be > 0 ms");
    if (spec.duration_ms && !(*spec.duration_ms > 0.0)) {
        throw ValidationError("duration must be > 0 ms");
    }

    const bool stochastic = spec.id == ExperimentId::table1 || spec.id == ExperimentId::fig4 ||
                            spec.id == ExperimentId::fig5;
    if (stochastic && spec.sample_count < min_stochastic_samples) {
        throw ValidationError(fmt::format("sample count must be >= {}", min_stochastic_samples));
    }

    switch (spec.id) {
        case ExperimentId::table1:
            if (spec.kappas.empty()) throw ValidationError("table1 needs at least one kappa");
            break;
        case ExperimentId::fig5:
            if (spec.granularity_points.empty()) {
                throw ValidationError("fig5 needs at least one granularity point");
            }
            for (const double g : spec.granularity_points) {
                if (!std::isfinite(g) || (spec.granularity_axis == GranularityAxis::absolute_ns &&
                                          g < 0.0)) {
                    throw ValidationError("invalid granularity sweep point");
                }
            }
            break;
        case ExperimentId::fig6:
        case ExperimentId::fig7:
            if (spec.periods_ms.empty()) throw ValidationError("at least one sync period is required");
            if (spec.id == ExperimentId::fig7) {
                for (const double p : spec.periods_ms) {
                    if (p < 1.0 || p > 150.0) {
                        throw ValidationError("fig7 periods must lie in [1, 150] ms");
                    }
                }
                if (spec.repetitions == 0 || spec.syncs_per_trace == 0) {
                    throw ValidationError("fig7 needs repetitions > 0 and syncs per trace > 0");
                }
            }
            break;
        case ExperimentId::capacity:
            if (spec.payload.total_bits() <= 0 || spec.payload.header_bits < 0 ||
                spec.payload.origin_timestamp_bits < 0 || spec.payload.other_field_bits < 0) {
                throw ValidationError("payload field widths must be >= 0 with a positive total");
            }
            if (spec.sib_max_bits < 0) throw ValidationError("SIB size must be >= 0");
            break;
        case ExperimentId::fig4:
            break;
    }
}

nlohmann::json effective_config(const ExperimentSpec& spec) {
    const auto& e = spec.errors;
    nlohmann::json correction = {{"kind", correction_kind_name(e.correction.kind)}};
    if (e.correction.kind == CorrectionKind::custom) correction["custom_ns"] = e.correction.custom_ns;
    return {
        {"experiment", to_string(spec.id)},
        {"scs_khz", spec.scs_khz},
        {"kappas", spec.kappas},
        {"errors",
         {
             {"tae_bound_ns", e.tae_bound_ns},
             {"granularity_lo_ns", e.rtge_granularity.lo_ns},
             {"granularity_hi_ns", e.rtge_granularity.hi_ns},
             {"toa_model", toa_kind_name(e.toa.kind)},
             {"kappa", e.toa.kappa},
             {"correction", std::move(correction)},
             {"true_pd_ns", e.true_pd_ns ? nlohmann::json(*e.true_pd_ns) : nlohmann::json("default")},
         }},
        {"n_tafo", spec.n_tafo},
        {"legacy_nta_scaling", spec.legacy_nta_scaling},
        {"theta_ppm", spec.theta_ppm},
        {"periods_ms", spec.periods_ms},
        {"duration_ms", spec.duration_ms ? nlohmann::json(*spec.duration_ms) : nlohmann::json("default")},
        {"tick_ms", spec.tick_ms ? nlohmann::json(*spec.tick_ms) : nlohmann::json("default")},
        {"sample_count", spec.sample_count},
        {"repetitions", spec.repetitions},
        {"syncs_per_trace", spec.syncs_per_trace},
        {"granularity_axis",
         spec.granularity_axis == GranularityAxis::slot_fraction ? "slot_fraction" : "absolute_ns"},
        {"granularity_points", spec.granularity_points},
        {"seed", spec.seed},
        {"payload_bits",
         {{"header", spec.payload.header_bits},
          {"origin_timestamp", spec.payload.origin_timestamp_bits},
          {"other", spec.payload.other_field_bits}}},
        {"sib_max_bits", spec.sib_max_bits},
    };
}

std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

// ---- table1 -------------------------------------------------------------

const Table1Cell& Table1Result::at(int scs_khz, double kappa, bool corrected) const {
    for (const auto& c : cells) {
        if (c.scs_khz == scs_khz && c.kappa == kappa && c.corrected == corrected) return c;
    }
    throw std::out_of_range(fmt::format("no table1 cell for {} kHz, kappa {}, corrected {}",
                                        scs_khz, kappa, corrected));
}

Table1Result run_table1(const ExperimentSpec& spec) {
    validate(spec);
    Table1Result result;
    for (const int scs : spec.scs_khz) {
        for (const double kappa : spec.kappas) {
            for (const bool corrected : {false, true}) {
                result.cells.push_back(Table1Cell{scs, kappa, corrected, {}, 0});
            }
        }
    }
    const Correction corrected_with = table1_correction(spec);
    parallel_for(result.cells.size(), spec.jobs, [&](std::size_t i) {
        auto& cell = result.cells[i];
        const auto num = numerology_for(spec, cell.scs_khz);
        const ToaModel toa{spec.errors.toa.kind, cell.kappa};
        const Correction corr = cell.corrected ? corrected_with : Correction{};
        const double true_pd = resolved_true_pd_ns(spec.errors, num);
        // Every cell replays the same stream: common random numbers.
        Rng rng(derive_seed(spec.seed, 0));
        std::vector<double> residuals(spec.sample_count);
        for (auto& r : residuals) {
            const auto pd = pd_estimation_residual(true_pd, num, toa, corr, rng);
            r = pd.residual_ns;
            if (pd.saturated) ++cell.saturations;
        }
        cell.stats = stats::summarize(residuals);
    });
    return result;
}

// ---- fig4 ---------------------------------------------------------------

Fig4Result run_fig4(const ExperimentSpec& spec) {
    validate(spec);
    Fig4Result result;
    result.series.resize(spec.scs_khz.size());
    std::vector<std::vector<double>> samples(spec.scs_khz.size());

    parallel_for(spec.scs_khz.size(), spec.jobs, [&](std::size_t i) {
        auto& series = result.series[i];
        series.scs_khz = spec.scs_khz[i];
        const auto num = numerology_for(spec, series.scs_khz);
        Rng rng(derive_seed(spec.seed, 0));
        auto& abs_err = samples[i];
        abs_err.resize(spec.sample_count);
        for (auto& v : abs_err) {
            const auto s = compose_sync_error(spec.errors, num, rng);
            if (s.ta_saturated) ++series.saturations;
            v = std::fabs(s.total_ns);
        }
        series.abs_stats = stats::summarize(abs_err, fig4_quantiles);
    });

    double top = 0.0;
    for (const auto& s : result.series) top = std::max(top, s.abs_stats.max_abs_ns);
    const auto steps = static_cast<std::size_t>(std::ceil(top / fig4_grid_step_ns));
    for (std::size_t k = 0; k <= steps; ++k) {
        result.grid_ns.push_back(static_cast<double>(k) * fig4_grid_step_ns);
    }
    parallel_for(result.series.size(), spec.jobs, [&](std::size_t i) {
        result.series[i].cdf = stats::empirical_cdf(samples[i], result.grid_ns);
    });
    return result;
}

// ---- fig5 ---------------------------------------------------------------

std::vector<Fig5Point> Fig5Result::curve(int scs_khz) const {
    std::vector<Fig5Point> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [&](const Fig5Point& p) { return p.scs_khz == scs_khz; });
    return out;
}

Fig5Result run_fig5(const ExperimentSpec& spec) {
    validate(spec);
    Fig5Result result;
    result.axis = spec.granularity_axis;
    for (const int scs : spec.scs_khz) {
        const auto num = numerology_for(spec, scs);
        const double slot_ns = num.slot_duration_ms() * 1e6;
        std::vector<Fig5Point> curve;
        for (const double x : spec.granularity_points) {
            const double g = spec.granularity_axis == GranularityAxis::slot_fraction
                                 ? slot_ns / std::pow(10.0, x)
                                 : x;
            curve.push_back(Fig5Point{scs, x, g, 0.0});
        }
        std::sort(curve.begin(), curve.end(),
                  [](const Fig5Point& a, const Fig5Point& b) { return a.granularity_ns < b.granularity_ns; });
        result.points.insert(result.points.end(), curve.begin(), curve.end());
    }

    parallel_for(result.points.size(), spec.jobs, [&](std::size_t i) {
        auto& point = result.points[i];
        const auto num = numerology_for(spec, point.scs_khz);
        ErrorConfig cfg = spec.errors;
        cfg.rtge_granularity = GranularityRange::fixed(point.granularity_ns);
        Rng rng(derive_seed(spec.seed, 0));
        double m = 0.0;
        for (std::size_t k = 0; k < spec.sample_count; ++k) {
            m = std::max(m, std::fabs(compose_sync_error(cfg, num, rng).total_ns));
        }
        point.max_error_ns = m;
    });
    return result;
}

std::optional<double> threshold_crossing(const std::vector<Fig5Point>& curve, double threshold_ns) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].max_error_ns < threshold_ns) continue;
        if (i == 0) return curve[0].granularity_ns;
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        const double frac = (threshold_ns - a.max_error_ns) / (b.max_error_ns - a.max_error_ns);
        return a.granularity_ns + frac * (b.granularity_ns - a.granularity_ns);
    }
    return std::nullopt;
}

// ---- fig6 ---------------------------------------------------------------

Fig6Result run_fig6(const ExperimentSpec& spec) {
    validate(spec);
    Fig6Result result;
    result.scs_khz = spec.scs_khz.front();
    result.traces.resize(spec.periods_ms.size());
    parallel_for(spec.periods_ms.size(), spec.jobs, [&](std::size_t i) {
        SimConfig cfg;
        cfg.theta_ppm = spec.theta_ppm;
        cfg.sync_period_ms = spec.periods_ms[i];
        cfg.duration_ms = spec.duration_ms.value_or(600.0);
        cfg.tick_ms = spec.tick_ms;
        cfg.seed = spec.seed;
        cfg.numerology = numerology_for(spec, result.scs_khz);
        cfg.errors = spec.errors;
        auto& out = result.traces[i];
        out.period_ms = cfg.sync_period_ms;
        out.trace = simulate(cfg);
        out.max_abs_ns = out.trace.max_abs_x_td_ns();
        out.below_threshold = out.max_abs_ns < error_threshold_ns;
    });
    return result;
}

// ---- fig7 ---------------------------------------------------------------

std::vector<Fig7Point> Fig7Result::curve(int scs_khz) const {
    std::vector<Fig7Point> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [&](const Fig7Point& p) { return p.scs_khz == scs_khz; });
    return out;
}

Fig7Result run_fig7(const ExperimentSpec& spec) {
    validate(spec);
    Fig7Result result;
    auto periods = spec.periods_ms;
    std::sort(periods.begin(), periods.end());
    for (const int scs : spec.scs_khz) {
        for (const double p : periods) result.points.push_back(Fig7Point{scs, p, 0.0});
    }
    parallel_for(result.points.size(), spec.jobs, [&](std::size_t i) {
        auto& point = result.points[i];
        SimConfig cfg;
        cfg.theta_ppm = spec.theta_ppm;
        cfg.sync_period_ms = point.period_ms;
        cfg.duration_ms = point.period_ms * static_cast<double>(spec.syncs_per_trace);
        cfg.tick_ms = spec.tick_ms;
        cfg.numerology = numerology_for(spec, point.scs_khz);
        cfg.errors = spec.errors;
        double m = 0.0;
        for (std::size_t r = 0; r < spec.repetitions; ++r) {
            cfg.seed = derive_seed(spec.seed, r);
            m = std::max(m, simulate_max_abs(cfg).max_abs_x_td_ns);
        }
        point.max_error_ns = m;
    });
    return result;
}

// ---- Capacity -----------------------------------------------------------

CapacityResult run_capacity(const ExperimentSpec& spec) {
    validate(spec);
    return CapacityResult{spec.payload, spec.sib_max_bits,
                          capacity::sib_domain_capacity(spec.payload.total_bits(), spec.sib_max_bits)};
}

// ---- Output -------------------------------------------------------------

namespace {

ExperimentOutput render_table1(const ExperimentSpec& spec, const Table1Result& r) {
    ExperimentOutput out{"table1", {}, meta_block(spec, "table1"), {}};
    std::ostringstream csv;
    csv << "scs_khz,kappa,corrected,abs_mean_ns,mean_ns,mean_magnitude_ns,max_abs_ns,count,saturations\n";
    nlohmann::json cells = nlohmann::json::array();
    std::ostringstream text;
    text << fmt::format("{:>7} {:>5} {:>9} {:>12} {:>12} {:>12}\n", "SCS", "kappa", "corrected",
                        "|mean| (ns)", "mean (ns)", "max (ns)");
    for (const auto& c : r.cells) {
        csv << fmt::format("{},{},{},{},{},{},{},{},{}\n", c.scs_khz, c.kappa, c.corrected ? 1 : 0,
                           c.stats.abs_mean_ns, c.stats.mean_ns, c.stats.mean_magnitude_ns(),
                           c.stats.max_abs_ns, c.stats.count, c.saturations);
        auto j = stats::to_json(c.stats);
        j["scs_khz"] = c.scs_khz;
        j["kappa"] = c.kappa;
        j["corrected"] = c.corrected;
        j["saturations"] = c.saturations;
        cells.push_back(std::move(j));
        text << fmt::format("{:>4} kHz {:>5} {:>9} {:>12.1f} {:>12.1f} {:>12.1f}\n", c.scs_khz,
                            c.kappa, c.corrected ? "yes" : "no", c.stats.abs_mean_ns,
                            c.stats.mean_ns, c.stats.max_abs_ns);
    }
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)}, {"cells", std::move(cells)}};
    out.summary = text.str();
    return out;
}

ExperimentOutput render_fig4(const ExperimentSpec& spec, const Fig4Result& r) {
    ExperimentOutput out{"fig4", {}, meta_block(spec, "fig4"), {}};
    std::ostringstream csv;
    csv << "scs_khz,value_ns,probability\n";
    nlohmann::json series = nlohmann::json::array();
    std::ostringstream text;
    for (const auto& s : r.series) {
        for (const auto& p : s.cdf) {
            csv << fmt::format("{},{},{}\n", s.scs_khz, p.value_ns, p.probability);
        }
        series.push_back({{"scs_khz", s.scs_khz},
                          {"abs_error", stats::to_json(s.abs_stats)},
                          {"saturations", s.saturations},
                          {"cdf", stats::to_json(s.cdf)}});
        text << fmt::format("{:>4} kHz  p99.9 = {:7.1f} ns  p99.999 = {:7.1f} ns  max = {:7.1f} ns\n",
                            s.scs_khz, s.abs_stats.percentiles.at(0.999),
                            s.abs_stats.percentiles.at(0.99999), s.abs_stats.max_abs_ns);
    }
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)},
                {"cdf_columns", {"value_ns", "probability"}},
                {"series", std::move(series)}};
    out.summary = text.str();
    return out;
}

ExperimentOutput render_fig5(const ExperimentSpec& spec, const Fig5Result& r) {
    ExperimentOutput out{"fig5", {}, meta_block(spec, "fig5"), {}};
    const bool fraction = r.axis == GranularityAxis::slot_fraction;
    std::ostringstream csv;
    csv << (fraction ? "scs_khz,slot_fraction_exponent,granularity_ns,max_error_ns\n"
                     : "scs_khz,granularity_axis_ns,granularity_ns,max_error_ns\n");
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        csv << fmt::format("{},{},{},{}\n", p.scs_khz, p.axis_value, p.granularity_ns, p.max_error_ns);
        points.push_back({{"scs_khz", p.scs_khz},
                          {"axis_value", p.axis_value},
                          {"granularity_ns", p.granularity_ns},
                          {"max_error_ns", p.max_error_ns}});
    }
    std::ostringstream text;
    for (const int scs : spec.scs_khz) {
        const auto crossing = threshold_crossing(r.curve(scs), error_threshold_ns);
        text << fmt::format("{:>4} kHz  max error reaches {} ns at G_R = {}\n", scs,
                            error_threshold_ns,
                            crossing ? fmt::format("{:.1f} ns", *crossing) : "(never in sweep)");
    }
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)},
                {"axis", fraction ? "slot_fraction" : "absolute_ns"},
                {"points", std::move(points)}};
    out.summary = text.str();
    return out;
}

ExperimentOutput render_fig6(const ExperimentSpec& spec, const Fig6Result& r) {
    ExperimentOutput out{"fig6", {}, meta_block(spec, "fig6"), {}};
    std::ostringstream csv;
    csv << "period_ms,t_ms,x_td_ns,is_sync\n";
    nlohmann::json traces = nlohmann::json::array();
    std::ostringstream text;
    for (const auto& t : r.traces) {
        for (const auto& p : t.trace.points) {
            csv << fmt::format("{},{},{},{}\n", t.period_ms, p.t_ms, p.x_td_ns, p.is_sync ? 1 : 0);
        }
        auto j = trace_to_json(t.trace);
        j["period_ms"] = t.period_ms;
        j["below_threshold"] = t.below_threshold;
        traces.push_back(std::move(j));
        text << fmt::format("{:>4} kHz  period {:>5} ms  max |x_td| = {:7.1f} ns  ({} {} ns)\n",
                            r.scs_khz, t.period_ms, t.max_abs_ns,
                            t.below_threshold ? "below" : "above", error_threshold_ns);
    }
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)},
                {"scs_khz", r.scs_khz},
                {"threshold_ns", error_threshold_ns},
                {"traces", std::move(traces)}};
    out.summary = text.str();
    return out;
}

ExperimentOutput render_fig7(const ExperimentSpec& spec, const Fig7Result& r) {
    ExperimentOutput out{"fig7", {}, meta_block(spec, "fig7"), {}};
    std::ostringstream csv;
    csv << "scs_khz,period_ms,max_error_ns\n";
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        csv << fmt::format("{},{},{}\n", p.scs_khz, p.period_ms, p.max_error_ns);
        points.push_back(
            {{"scs_khz", p.scs_khz}, {"period_ms", p.period_ms}, {"max_error_ns", p.max_error_ns}});
    }
    std::ostringstream text;
    for (const int scs : spec.scs_khz) {
        const auto c = r.curve(scs);
        if (c.empty()) continue;
        text << fmt::format("{:>4} kHz  max error {:7.1f} ns at {} ms ... {:7.1f} ns at {} ms\n", scs,
                            c.front().max_error_ns, c.front().period_ms, c.back().max_error_ns,
                            c.back().period_ms);
    }
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)}, {"points", std::move(points)}};
    out.summary = text.str();
    return out;
}

ExperimentOutput render_capacity(const ExperimentSpec& spec, const CapacityResult& r) {
    ExperimentOutput out{"capacity", {}, meta_block(spec, "capacity"), {}};
    const auto used = r.domains * r.layout.total_bits();
    std::ostringstream csv;
    csv << "field,bits\n"
        << "header," << r.layout.header_bits << "\n"
        << "origin_timestamp," << r.layout.origin_timestamp_bits << "\n"
        << "other," << r.layout.other_field_bits << "\n"
        << "payload_total," << r.layout.total_bits() << "\n"
        << "sib_max," << r.sib_max_bits << "\n"
        << "used," << used << "\n"
        << "spare," << r.sib_max_bits - used << "\n"
        << "domains," << r.domains << "\n";
    out.csv = csv.str();
    out.json = {{"meta", std::move(out.json)},
                {"payload_bits",
                 {{"header", r.layout.header_bits},
                  {"origin_timestamp", r.layout.origin_timestamp_bits},
                  {"other", r.layout.other_field_bits},
                  {"total", r.layout.total_bits()}}},
                {"sib_max_bits", r.sib_max_bits},
                {"used_bits", used},
                {"spare_bits", r.sib_max_bits - used},
                {"domains", r.domains}};
    out.summary = fmt::format(
        "payload per domain: header {} + originTimestamp {} + other {} = {} bits\n"
        "SIB budget: {} bits ({} used, {} spare)\n"
        "{} domains\n",
        r.layout.header_bits, r.layout.origin_timestamp_bits, r.layout.other_field_bits,
        r.layout.total_bits(), r.sib_max_bits, used, r.sib_max_bits - used, r.domains);
    return out;
}

}  // namespace

ExperimentOutput run(const ExperimentSpec& spec) {
    switch (spec.id) {
        case ExperimentId::table1: return render_table1(spec, run_table1(spec));
        case ExperimentId::fig4: return render_fig4(spec, run_fig4(spec));
        case ExperimentId::fig5: return render_fig5(spec, run_fig5(spec));
        case ExperimentId::fig6: return render_fig6(spec, run_fig6(spec));
        case ExperimentId::fig7: return render_fig7(spec, run_fig7(spec));
        case ExperimentId::capacity: return render_capacity(spec, run_capacity(spec));
    }
    throw std::logic_error("unknown experiment");
}

ExperimentOutput run_simulation(const SimConfig& cfg, int scs_khz) {
    const Trace trace = simulate(cfg);
    ExperimentOutput out;
    out.id = "simulate";
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    out.csv = csv.str();

    const auto& e = cfg.errors;
    nlohmann::json config = {
        {"scs_khz", scs_khz},
        {"theta_ppm", cfg.theta_ppm},
        {"sync_period_ms", cfg.sync_period_ms},
        {"duration_ms", cfg.duration_ms},
        {"tick_ms", cfg.effective_tick_ms()},
        {"seed", cfg.seed},
        {"n_tafo", cfg.numerology.n_tafo},
        {"legacy_nta_scaling", cfg.numerology.legacy_nta_scaling},
        {"errors",
         {{"tae_bound_ns", e.tae_bound_ns},
          {"granularity_lo_ns", e.rtge_granularity.lo_ns},
          {"granularity_hi_ns", e.rtge_granularity.hi_ns},
          {"toa_model", toa_kind_name(e.toa.kind)},
          {"kappa", e.toa.kappa},
          {"correction", correction_kind_name(e.correction.kind)},
          {"correction_custom_ns", e.correction.custom_ns},
          {"true_pd_ns", resolved_true_pd_ns(e, cfg.numerology)}}},
    };
    const std::string hash = config_hash(config);
    out.json = {{"meta",
                 {{"tool", "otasync"},
                  {"version", tool_version},
                  {"config_schema_version", config_schema_version},
                  {"experiment", "simulate"},
                  {"seed", cfg.seed},
                  {"sample_count", trace.points.size()},
                  {"config_hash", hash},
                  {"config", std::move(config)}}},
                {"trace", trace_to_json(trace)}};
    out.summary = fmt::format("{} samples, {} syncs, max |x_td| = {:.1f} ns, {} TA saturations\n",
                              trace.points.size(), trace.syncs.size(), trace.max_abs_x_td_ns(),
                              trace.saturation_count);
    return out;
}

void write_output(const ExperimentOutput& out, const std::filesystem::path& dir, OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }
    auto write = [&](const std::filesystem::path& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        f << body;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + path.string());
    };
    if (format == OutputFormat::csv || format == OutputFormat::both) {
        write(dir / (out.id + ".csv"), out.csv);
    }
    if (format == OutputFormat::json || format == OutputFormat::both) {
        write(dir / (out.id + ".json"), out.json.dump(2) + "\n");
    }
}

}  // namespace otasync::experiments

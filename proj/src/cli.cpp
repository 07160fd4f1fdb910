// SPDX-License-Identifier: Apache-2.0

#include "otasync/cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "otasync/experiments.hpp"

namespace otasync::cli {

namespace {

namespace ex = otasync::experiments;

/// Raw flag values. Options left at count() == 0 keep the preset of the
/// experiment being run.
struct Flags {
    std::vector<int> scs;
    std::vector<double> kappa;
    std::vector<double> period_ms;
    double duration_ms{0.0};
    double tick_ms{0.0};
    double theta_ppm{0.0};
    double granularity_ns{0.0};
    std::string granularity_range;
    std::string granularity_axis;
    std::vector<double> granularity_points;
    std::string toa_model;
    std::string correction;
    double tae_ns{0.0};
    double true_pd_ns{0.0};
    double n_tafo{0.0};
    bool legacy_nta_scaling{false};
    std::size_t samples{0};
    std::size_t repetitions{0};
    std::size_t syncs{0};
    std::uint64_t seed{1};
    std::int64_t header_bits{0};
    std::int64_t timestamp_bits{0};
    std::int64_t other_bits{0};
    std::int64_t sib_bits{0};
    std::string out_dir{"results"};
    std::string format{"both"};
    unsigned jobs{1};
};

struct Options {
    CLI::Option* scs{};
    CLI::Option* kappa{};
    CLI::Option* period{};
    CLI::Option* duration{};
    CLI::Option* tick{};
    CLI::Option* theta{};
    CLI::Option* granularity{};
    CLI::Option* granularity_range{};
    CLI::Option* granularity_axis{};
    CLI::Option* granularity_points{};
    CLI::Option* toa{};
    CLI::Option* correction{};
    CLI::Option* tae{};
    CLI::Option* true_pd{};
    CLI::Option* n_tafo{};
    CLI::Option* samples{};
    CLI::Option* repetitions{};
    CLI::Option* syncs{};
    CLI::Option* seed{};
    CLI::Option* header_bits{};
    CLI::Option* timestamp_bits{};
    CLI::Option* other_bits{};
    CLI::Option* sib_bits{};
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

double parse_number(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("{}: '{}' is not a number", what, text));
    }
}

void apply_error_flags(const Flags& f, const Options& o, ErrorConfig& errors) {
    if (given(o.tae)) errors.tae_bound_ns = f.tae_ns;
    if (given(o.granularity) && given(o.granularity_range)) {
        throw ValidationError("--granularity-ns and --granularity-range are mutually exclusive");
    }
    if (given(o.granularity)) errors.rtge_granularity = GranularityRange::fixed(f.granularity_ns);
    if (given(o.granularity_range)) {
        const auto colon = f.granularity_range.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("--granularity-range expects lo:hi");
        }
        errors.rtge_granularity.lo_ns =
            parse_number(f.granularity_range.substr(0, colon), "--granularity-range");
        errors.rtge_granularity.hi_ns =
            parse_number(f.granularity_range.substr(colon + 1), "--granularity-range");
    }
    if (given(o.toa)) {
        if (f.toa_model == "table") {
            errors.toa.kind = ToaModelKind::table_3gpp;
        } else if (f.toa_model == "gaussian") {
            errors.toa.kind = ToaModelKind::gaussian;
        } else if (f.toa_model == "none") {
            errors.toa.kind = ToaModelKind::none;
        } else {
            throw ValidationError("--toa-model must be table, gaussian or none");
        }
    }
    if (given(o.kappa)) errors.toa.kappa = f.kappa.front();
    if (given(o.correction)) {
        if (f.correction == "none") {
            errors.correction = Correction{};
        } else if (f.correction == "auto") {
            errors.correction = Correction{CorrectionKind::half_granularity, 0.0};
        } else {
            errors.correction =
                Correction{CorrectionKind::custom, parse_number(f.correction, "--correction")};
        }
    }
    if (given(o.true_pd)) errors.true_pd_ns = f.true_pd_ns;
}

ex::ExperimentSpec build_spec(ex::ExperimentId id, const Flags& f, const Options& o) {
    ex::ExperimentSpec spec = ex::default_spec(id);
    if (given(o.scs)) spec.scs_khz = f.scs;
    if (given(o.kappa)) spec.kappas = f.kappa;
    apply_error_flags(f, o, spec.errors);
    if (given(o.n_tafo)) spec.n_tafo = f.n_tafo;
    spec.legacy_nta_scaling = f.legacy_nta_scaling;
    if (given(o.theta)) spec.theta_ppm = f.theta_ppm;
    if (given(o.period)) spec.periods_ms = f.period_ms;
    if (given(o.duration)) spec.duration_ms = f.duration_ms;
    if (given(o.tick)) spec.tick_ms = f.tick_ms;
    if (given(o.samples)) spec.sample_count = f.samples;
    if (given(o.repetitions)) spec.repetitions = f.repetitions;
    if (given(o.syncs)) spec.syncs_per_trace = f.syncs;
    if (given(o.granularity_axis)) {
        if (f.granularity_axis == "fraction") {
            spec.granularity_axis = ex::GranularityAxis::slot_fraction;
        } else if (f.granularity_axis == "ns") {
            spec.granularity_axis = ex::GranularityAxis::absolute_ns;
            if (!given(o.granularity_points)) {
                spec.granularity_points = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
            }
        } else {
            throw ValidationError("--granularity-axis must be fraction or ns");
        }
    }
    if (given(o.granularity_points)) spec.granularity_points = f.granularity_points;
    if (given(o.seed)) spec.seed = f.seed;
    if (given(o.header_bits)) spec.payload.header_bits = f.header_bits;
    if (given(o.timestamp_bits)) spec.payload.origin_timestamp_bits = f.timestamp_bits;
    if (given(o.other_bits)) spec.payload.other_field_bits = f.other_bits;
    if (given(o.sib_bits)) spec.sib_max_bits = f.sib_bits;
    spec.jobs = f.jobs;
    ex::validate(spec);
    return spec;
}

SimConfig build_sim_config(const Flags& f, const Options& o, int& scs_out) {
    if (given(o.scs) && f.scs.size() != 1) {
        throw ValidationError("simulate takes exactly one --scs");
    }
    if (given(o.period) && f.period_ms.size() != 1) {
        throw ValidationError("simulate takes exactly one --period-ms");
    }
    scs_out = given(o.scs) ? f.scs.front() : 15;
    SimConfig cfg;
    try {
        cfg.numerology = nr::numerology_for_scs(scs_out);
    } catch (const std::domain_error& e) {
        throw ValidationError(e.what());
    }
    if (given(o.n_tafo)) cfg.numerology.n_tafo = f.n_tafo;
    cfg.numerology.legacy_nta_scaling = f.legacy_nta_scaling;
    apply_error_flags(f, o, cfg.errors);
    if (given(o.theta)) cfg.theta_ppm = f.theta_ppm;
    if (given(o.period)) cfg.sync_period_ms = f.period_ms.front();
    if (given(o.duration)) cfg.duration_ms = f.duration_ms;
    if (given(o.tick)) cfg.tick_ms = f.tick_ms;
    if (given(o.seed)) cfg.seed = f.seed;
    validate(cfg);
    return cfg;
}

ex::OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return ex::OutputFormat::csv;
    if (s == "json") return ex::OutputFormat::json;
    if (s == "both") return ex::OutputFormat::both;
    throw ValidationError("--format must be csv, json or both");
}

void emit(const ex::ExperimentOutput& result, const Flags& f, ex::OutputFormat format,
          std::ostream& out) {
    ex::write_output(result, f.out_dir, format);
    out << "== " << result.id << "\n" << result.summary;
    out << "wrote " << (std::filesystem::path(f.out_dir) / result.id).string() << ".{"
        << (format == ex::OutputFormat::both ? "csv,json" : format == ex::OutputFormat::csv ? "csv" : "json")
        << "}\n";
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Over-the-air 5G/TSN time synchronization error simulator", "otasync"};
    app.set_version_flag("--version", fmt::format("otasync {} (config schema {})", ex::tool_version,
                                                  ex::config_schema_version));
    app.set_config("--config", "", "Read `key = value` settings (keys are flag names)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    Flags f;
    Options o;
    o.scs = app.add_option("--scs", f.scs, "Sub-carrier spacing in kHz: 15, 30, 60 or 120 (repeatable)")
                ->delimiter(',');
    o.kappa = app.add_option("--kappa", f.kappa, "ToA channel factor; sigma = U / kappa (repeatable for table1)")
                  ->delimiter(',');
    o.period = app.add_option("--period-ms", f.period_ms, "Sync period(s) in ms (fig7 takes a sweep)")
                   ->delimiter(',');
    o.duration = app.add_option("--duration-ms", f.duration_ms, "Simulated span in ms");
    o.tick = app.add_option("--tick-ms", f.tick_ms, "Simulation tick in ms (default min(1, period/10))");
    o.theta = app.add_option("--theta-ppm", f.theta_ppm, "UE clock drift in ppm (10 ppm = 10 ns/ms)");
    o.granularity = app.add_option("--granularity-ns", f.granularity_ns, "Fixed reference time granularity G_R in ns");
    o.granularity_range = app.add_option("--granularity-range", f.granularity_range,
                                         "G_R drawn uniformly from lo:hi ns per sync");
    o.granularity_axis = app.add_option("--granularity-axis", f.granularity_axis,
                                        "fig5 sweep axis: fraction (slot/10^x) or ns");
    o.granularity_points = app.add_option("--granularity-points", f.granularity_points,
                                          "fig5 sweep points: exponents x or G_R values in ns")
                               ->delimiter(',');
    o.toa = app.add_option("--toa-model", f.toa_model, "ToA error model: table, gaussian or none");
    o.correction = app.add_option("--correction", f.correction,
                                  "PD correction: none, auto (+T_gran/2) or an offset in ns");
    o.tae = app.add_option("--tae-ns", f.tae_ns, "TAE half-width in ns (default 65)");
    o.true_pd = app.add_option("--true-pd-ns", f.true_pd_ns, "True one-way path delay in ns (default 10.37 U)");
    o.n_tafo = app.add_option("--n-tafo", f.n_tafo, "N_TAfo constant added to the TA step (default 0)");
    app.add_flag("--legacy-nta-scaling", f.legacy_nta_scaling,
                 "Use N_TA = 16*64*2^mu (TA step grows with SCS)");
    o.samples = app.add_option("--samples", f.samples, "Monte-Carlo draws per cell");
    o.repetitions = app.add_option("--repetitions", f.repetitions, "fig7 traces per point (default 10000)");
    o.syncs = app.add_option("--syncs", f.syncs, "fig7 sync intervals per trace (default 10)");
    o.seed = app.add_option("--seed", f.seed, "RNG seed (default 1)");
    o.header_bits = app.add_option("--header-bits", f.header_bits, "capacity: message header bits (default 272)");
    o.timestamp_bits = app.add_option("--timestamp-bits", f.timestamp_bits, "capacity: originTimestamp bits (default 80)");
    o.other_bits = app.add_option("--other-bits", f.other_bits, "capacity: other payload bits (default 0)");
    o.sib_bits = app.add_option("--sib-bits", f.sib_bits, "capacity: SIB size limit in bits (default 2976)");
    app.add_option("--out", f.out_dir, "Output directory (default results)");
    app.add_option("--format", f.format, "Output format: csv, json or both (default both)");
    app.add_option("--jobs", f.jobs, "Worker threads for independent cells (default 1)");

    std::vector<CLI::App*> subs;
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        subs.push_back(s);
        return s;
    };
    CLI::App* simulate_cmd = sub("simulate", "Simulate one drift trace and write simulate.{csv,json}");
    sub("table1", "PD/ToA estimation error statistics per SCS, kappa and correction");
    sub("fig4", "CDF of |sync error| per SCS");
    sub("fig5", "Max sync error against reference time granularity");
    sub("fig6", "Drift traces for 60 and 120 ms sync periods");
    sub("fig7", "Max time difference against sync period per SCS");
    sub("capacity", "TSN domains that fit in one SIB");
    CLI::App* all_cmd = sub("all", "Run every experiment preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (f.jobs == 0) throw ValidationError("--jobs must be >= 1");
        const auto format = parse_format(f.format);

        if (simulate_cmd->parsed()) {
            int scs = 15;
            const SimConfig cfg = build_sim_config(f, o, scs);
            emit(ex::run_simulation(cfg, scs), f, format, out);
            return exit_ok;
        }
        std::vector<ex::ExperimentId> ids;
        if (all_cmd->parsed()) {
            ids = ex::all_experiments();
        } else {
            for (CLI::App* s : subs) {
                if (!s->parsed()) continue;
                if (const auto id = ex::parse_experiment_id(s->get_name())) ids.push_back(*id);
            }
        }
        // Validate every spec before the first (possibly long) run.
        std::vector<ex::ExperimentSpec> specs;
        for (const auto id : ids) specs.push_back(build_spec(id, f, o));
        for (const auto& spec : specs) emit(ex::run(spec), f, format, out);
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "otasync: invalid configuration: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        err << "otasync: invalid configuration: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "otasync: error: " << e.what() << "\n";
        return exit_io_error;
    }
}

}  // namespace otasync::cli

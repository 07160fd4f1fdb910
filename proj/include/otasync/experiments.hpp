// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "otasync/capacity.hpp"
#include "otasync/clock_sim.hpp"
#include "otasync/error_models.hpp"
#include "otasync/stats.hpp"

namespace otasync::experiments {

inline constexpr std::string_view tool_version = "1.0.0";
inline constexpr int config_schema_version = 1;

/// Sync error threshold used for the pass/fail verdicts.
inline constexpr double error_threshold_ns = 1000.0;

/// Stochastic experiments refuse fewer samples than this.
inline constexpr std::size_t min_stochastic_samples = 10'000;

enum class ExperimentId { table1, fig4, fig5, fig6, fig7, capacity };

std::string_view to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(std::string_view name);
const std::vector<ExperimentId>& all_experiments();

/// fig5 x-axis: granularity as slot / 10^x, or G_R in ns directly.
enum class GranularityAxis { slot_fraction, absolute_ns };

struct ExperimentSpec {
    ExperimentId id{ExperimentId::table1};
    std::vector<int> scs_khz{15, 30, 60, 120};
    std::vector<double> kappas{2.0, 1.0};  // table1 rows
    ErrorConfig errors{};
    double n_tafo{0.0};
    bool legacy_nta_scaling{false};
    double theta_ppm{10.0};
    std::vector<double> periods_ms{};
    std::optional<double> duration_ms{};
    std::optional<double> tick_ms{};
    std::size_t sample_count{1'000'000};
    std::size_t repetitions{10'000};  // fig7 traces per (SCS, period)
    std::size_t syncs_per_trace{10};  // fig7 trace length in sync intervals
    GranularityAxis granularity_axis{GranularityAxis::slot_fraction};
    std::vector<double> granularity_points{};
    std::uint64_t seed{1};
    unsigned jobs{1};
    capacity::GptpPayloadLayout payload{};
    std::int64_t sib_max_bits{capacity::sib_max_bits};
};

/// Preset for each experiment; CLI flags and config files override it.
ExperimentSpec default_spec(ExperimentId id);

/// Throws ValidationError.
void validate(const ExperimentSpec& spec);

nr::Numerology numerology_for(const ExperimentSpec& spec, int scs_khz);

/// Everything that determines the output, echoed into the meta block.
nlohmann::json effective_config(const ExperimentSpec& spec);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

// ---- table1 -------------------------------------------------------------

struct Table1Cell {
    int scs_khz{15};
    double kappa{2.0};
    bool corrected{false};
    stats::SummaryStats stats{};
    std::size_t saturations{0};
};

struct Table1Result {
    std::vector<Table1Cell> cells;  // SCS-major, then kappa, then corrected

    /// Throws std::out_of_range when the cell was not run.
    const Table1Cell& at(int scs_khz, double kappa, bool corrected) const;
};

/// PD-estimation residual statistics for every (SCS, kappa, correction).
Table1Result run_table1(const ExperimentSpec& spec);

// ---- fig4 ---------------------------------------------------------------

struct Fig4Series {
    int scs_khz{15};
    stats::SummaryStats abs_stats{};  // over |sync error|
    std::vector<stats::CdfPoint> cdf;
    std::size_t saturations{0};
};

struct Fig4Result {
    std::vector<Fig4Series> series;
    std::vector<double> grid_ns;
};

inline constexpr double fig4_grid_step_ns = 5.0;
inline constexpr std::array<double, 6> fig4_quantiles{0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999};

/// CDF of |sync error| sampled at sync instants.
Fig4Result run_fig4(const ExperimentSpec& spec);

// ---- fig5 ---------------------------------------------------------------

struct Fig5Point {
    int scs_khz{15};
    double axis_value{0.0};  // exponent x or G_R in ns, per the axis
    double granularity_ns{0.0};
    double max_error_ns{0.0};
};

struct Fig5Result {
    GranularityAxis axis{GranularityAxis::slot_fraction};
    std::vector<Fig5Point> points;  // SCS-major, ascending G_R

    std::vector<Fig5Point> curve(int scs_khz) const;
};

/// Max |sync error| against a fixed G_R, with table-bound ToA errors.
Fig5Result run_fig5(const ExperimentSpec& spec);

/// Smallest G_R at which the curve reaches `threshold_ns`, interpolated
/// linearly between sweep points; nullopt when the curve never reaches it.
/// Expects points in ascending G_R order.
std::optional<double> threshold_crossing(const std::vector<Fig5Point>& curve,
                                         double threshold_ns);

// ---- fig6 ---------------------------------------------------------------

struct Fig6Trace {
    double period_ms{60.0};
    Trace trace;
    double max_abs_ns{0.0};
    bool below_threshold{false};
};

struct Fig6Result {
    int scs_khz{15};
    std::vector<Fig6Trace> traces;
};

/// Drift traces for each sync period at the first configured SCS.
Fig6Result run_fig6(const ExperimentSpec& spec);

// ---- fig7 ---------------------------------------------------------------

struct Fig7Point {
    int scs_khz{15};
    double period_ms{1.0};
    double max_error_ns{0.0};
};

struct Fig7Result {
    std::vector<Fig7Point> points;  // SCS-major, ascending period

    std::vector<Fig7Point> curve(int scs_khz) const;
};

/// Max |x_td| over `repetitions` traces per (SCS, period). Trace r uses
/// the same seed stream for every SCS and period.
Fig7Result run_fig7(const ExperimentSpec& spec);

// ---- Capacity -----------------------------------------------------------

struct CapacityResult {
    capacity::GptpPayloadLayout layout{};
    std::int64_t sib_max_bits{capacity::sib_max_bits};
    std::int64_t domains{0};
};

CapacityResult run_capacity(const ExperimentSpec& spec);

// ---- Output -------------------------------------------------------------

enum class OutputFormat { csv, json, both };

struct ExperimentOutput {
    std::string id;
    std::string csv;
    nlohmann::json json;
    std::string summary;  // short human-readable report
};

ExperimentOutput run(const ExperimentSpec& spec);

/// A single drift trace, written as `simulate.csv` / `simulate.json`.
ExperimentOutput run_simulation(const SimConfig& cfg, int scs_khz);

/// Writes `<id>.csv` and/or `<id>.json` into `dir`, creating it if needed.
/// Throws std::runtime_error on I/O failure.
void write_output(const ExperimentOutput& out, const std::filesystem::path& dir,
                  OutputFormat format);

}  // namespace otasync::experiments

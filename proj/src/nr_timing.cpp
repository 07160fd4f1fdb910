// SPDX-License-Identifier: Apache-2.0

#include "otasync/nr_timing.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace otasync::nr {

namespace {

constexpr double samples_per_ta_step = 16.0 * 64.0;

std::string mode_name(TaMode mode) {
    return mode == TaMode::connected ? "connected" : "random_access";
}

}  // namespace

double Numerology::scs_khz() const { return 15.0 * std::ldexp(1.0, mu); }

double Numerology::t_c_ns() const { return basic_time_unit_ns(delta_f_max_khz, n_f); }

double Numerology::slot_duration_ms() const { return std::ldexp(1.0, -mu); }

void validate(const Numerology& num) {
    if (num.mu < 0 || num.mu > 3) {
        throw std::domain_error("numerology index must be in 0..3, got " +
                                std::to_string(num.mu));
    }
    if (!(num.delta_f_max_khz > 0.0) || !(num.n_f > 0.0)) {
        throw std::domain_error("delta_f_max and n_f must be positive");
    }
    if (!std::isfinite(num.n_tafo) || num.n_tafo < 0.0) {
        throw std::domain_error("n_tafo must be a non-negative finite value");
    }
}

Numerology make_numerology(int mu) {
    Numerology num;
    num.mu = mu;
    validate(num);
    return num;
}

Numerology numerology_for_scs(int scs_khz) {
    switch (scs_khz) {
        case 15: return make_numerology(0);
        case 30: return make_numerology(1);
        case 60: return make_numerology(2);
        case 120: return make_numerology(3);
        default:
            throw std::domain_error("unsupported sub-carrier spacing " +
                                    std::to_string(scs_khz) + " kHz");
    }
}

double basic_time_unit_ns(double delta_f_max_khz, double n_f) {
    if (!(delta_f_max_khz > 0.0) || !(n_f > 0.0)) {
        throw std::domain_error("basic time unit needs positive delta_f_max and n_f");
    }
    // kHz -> Hz is 1e3, s -> ns is 1e9.
    return 1e6 / (delta_f_max_khz * n_f);
}

double ta_time_unit_ns(const Numerology& num) {
    validate(num);
    const double t_c = num.t_c_ns();
    if (num.legacy_nta_scaling) {
        return (samples_per_ta_step * std::ldexp(1.0, num.mu) + num.n_tafo) * t_c;
    }
    return std::ldexp((samples_per_ta_step + num.n_tafo) * t_c, -num.mu);
}

double ta_granularity_ns(const Numerology& num) { return ta_time_unit_ns(num) / 2.0; }

int ta_index_min(TaMode mode) {
    return mode == TaMode::connected ? ta_connected_min : ta_random_access_min;
}

int ta_index_max(TaMode mode) {
    return mode == TaMode::connected ? ta_connected_max : ta_random_access_max;
}

TaCommand make_ta_command(int index, TaMode mode) {
    if (index < ta_index_min(mode) || index > ta_index_max(mode)) {
        throw std::domain_error("TA index " + std::to_string(index) +
                                " out of range for " + mode_name(mode) + " mode");
    }
    return TaCommand{index, mode};
}

TaSaturationError::TaSaturationError(std::int64_t requested, TaMode mode)
    : std::range_error("TA index " + std::to_string(requested) + " saturates " +
                       mode_name(mode) + " range [" + std::to_string(ta_index_min(mode)) +
                       ", " + std::to_string(ta_index_max(mode)) + "]"),
      requested_(requested),
      mode_(mode) {}

TaCommand TaSaturationError::clamped() const noexcept {
    const auto lo = static_cast<std::int64_t>(ta_index_min(mode_));
    const auto hi = static_cast<std::int64_t>(ta_index_max(mode_));
    const auto idx = requested_ < lo ? lo : (requested_ > hi ? hi : requested_);
    return TaCommand{static_cast<int>(idx), mode_};
}

TaCommand ta_index_for_rtt(double delay_ns, const Numerology& num, TaMode mode) {
    if (!std::isfinite(delay_ns)) {
        throw std::domain_error("delay must be finite");
    }
    if (mode == TaMode::random_access && delay_ns < 0.0) {
        throw std::domain_error("round-trip time must be non-negative");
    }
    double ratio = delay_ns / ta_time_unit_ns(num);
    // Ratios within rounding noise of an integer count as that integer, so
    // delays built as exact multiples of U never drop a step.
    if (const double nearest = std::round(ratio);
        std::fabs(ratio - nearest) <=
            64.0 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, std::fabs(nearest))) {
        ratio = nearest;
    }
    const double steps = std::floor(ratio);
    // Far outside any index range; keep the conversion below well-defined.
    const double bounded = std::fmax(std::fmin(steps, 1e15), -1e15);
    std::int64_t index = static_cast<std::int64_t>(bounded);
    if (mode == TaMode::connected) {
        index += ta_connected_center;
    }
    if (index < ta_index_min(mode) || index > ta_index_max(mode)) {
        throw TaSaturationError(index, mode);
    }
    return TaCommand{static_cast<int>(index), mode};
}

double pd_compensation_connected(const TaCommand& ta, const Numerology& num) {
    if (ta.mode != TaMode::connected) {
        throw std::domain_error("PD compensation needs a connected-mode TA command");
    }
    make_ta_command(ta.index, ta.mode);
    return static_cast<double>(ta.index - ta_connected_center) * ta_time_unit_ns(num);
}

double path_delay_estimate(const PathDelayInput& input) {
    struct Visitor {
        double operator()(const CellRadiusInput& in) const {
            if (!(in.radius_m >= 0.0)) {
                throw std::domain_error("cell radius must be non-negative");
            }
            return in.radius_m / speed_of_light_m_per_s * 1e9;
        }
        double operator()(const TaBasedInput& in) const {
            if (in.ta.mode != TaMode::random_access) {
                throw std::domain_error("TA-based path delay needs an absolute TA index");
            }
            make_ta_command(in.ta.index, in.ta.mode);
            return static_cast<double>(in.ta.index) * ta_time_unit_ns(in.numerology) / 2.0;
        }
    };
    return std::visit(Visitor{}, input);
}

}  // namespace otasync::nr

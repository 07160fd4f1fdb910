// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

namespace otasync::nr {

inline constexpr double speed_of_light_m_per_s = 299'792'458.0;

inline constexpr int ta_connected_min = 0;
inline constexpr int ta_connected_max = 63;
inline constexpr int ta_connected_center = 31;
inline constexpr int ta_random_access_min = 0;
inline constexpr int ta_random_access_max = 3846;

/// NR numerology and the constants that derive the basic time unit.
///
/// `legacy_nta_scaling` selects N_TA = 16*64*2^mu (unit grows with mu)
/// instead of the default 16*64/2^mu, which halves the TA step for every
/// doubling of the sub-carrier spacing.
struct Numerology {
    int mu{0};
    double delta_f_max_khz{480.0};
    double n_f{4096.0};
    double n_tafo{0.0};
    bool legacy_nta_scaling{false};

    double scs_khz() const;
    double t_c_ns() const;
    double slot_duration_ms() const;
};

/// Throws std::domain_error when mu is outside 0..3 or a constant is non-positive.
void validate(const Numerology& num);

Numerology make_numerology(int mu);

/// Accepts 15, 30, 60 or 120 kHz.
Numerology numerology_for_scs(int scs_khz);

/// 1 / (delta_f_max * n_f), in ns.
double basic_time_unit_ns(double delta_f_max_khz, double n_f);

/// Duration of one TA index step, U(mu).
double ta_time_unit_ns(const Numerology& num);

/// Path-delay quantization granularity, U(mu) / 2.
double ta_granularity_ns(const Numerology& num);

enum class TaMode { connected, random_access };

struct TaCommand {
    int index{0};
    TaMode mode{TaMode::random_access};
};

int ta_index_min(TaMode mode);
int ta_index_max(TaMode mode);

/// Throws std::domain_error when the index is out of range for its mode.
TaCommand make_ta_command(int index, TaMode mode);

/// Raised when a delay maps to an index outside the mode's range. The
/// unclamped index is kept so the caller can decide to clamp.
class TaSaturationError : public std::range_error {
public:
    TaSaturationError(std::int64_t requested, TaMode mode);

    std::int64_t requested_index() const noexcept { return requested_; }
    TaMode mode() const noexcept { return mode_; }
    TaCommand clamped() const noexcept;

private:
    std::int64_t requested_;
    TaMode mode_;
};

/// random_access: `delay_ns` is the round-trip time (>= 0) and the index is
/// floor(rtt / U). connected: `delay_ns` is a signed adjustment and the
/// index is 31 + floor(delta / U).
TaCommand ta_index_for_rtt(double delay_ns, const Numerology& num,
                           TaMode mode = TaMode::random_access);

/// (index - 31) * U, signed. Only valid for connected-mode commands.
double pd_compensation_connected(const TaCommand& ta, const Numerology& num);

struct CellRadiusInput {
    double radius_m{0.0};
};

struct TaBasedInput {
    TaCommand ta;
    Numerology numerology;
};

using PathDelayInput = std::variant<CellRadiusInput, TaBasedInput>;

/// One-way path delay: R / C for cell radius input, TA * U / 2 for an
/// absolute (random access) TA index.
double path_delay_estimate(const PathDelayInput& input);

}  // namespace otasync::nr

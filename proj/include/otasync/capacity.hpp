// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace otasync::capacity {

inline constexpr std::int64_t sib_max_bits = 2976;

/// Bits one TSN domain needs in the SIB: the 802.1AS common header
/// (34 octets) and the 10-octet origin timestamp.
struct GptpPayloadLayout {
    std::int64_t header_bits{34 * 8};
    std::int64_t origin_timestamp_bits{10 * 8};
    std::int64_t other_field_bits{0};

    std::int64_t total_bits() const {
        return header_bits + origin_timestamp_bits + other_field_bits;
    }
};

/// floor(sib_max_bits / payload_bits). Throws std::domain_error when
/// payload_bits <= 0 or sib_max_bits < 0.
std::int64_t sib_domain_capacity(std::int64_t payload_bits,
                                 std::int64_t sib_max_bits = capacity::sib_max_bits);

}  // namespace otasync::capacity

// SPDX-License-Identifier: Apache-2.0

#include "otasync/capacity.hpp"

#include <stdexcept>

namespace otasync::capacity {

std::int64_t sib_domain_capacity(std::int64_t payload_bits, std::int64_t sib_max_bits) {
    if (payload_bits <= 0) {
        throw std::domain_error("payload must be at least one bit");
    }
    if (sib_max_bits < 0) {
        throw std::domain_error("SIB size must be non-negative");
    }
    return sib_max_bits / payload_bits;
}

}  // namespace otasync::capacity

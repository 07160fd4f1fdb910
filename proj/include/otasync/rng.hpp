// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace otasync {

/// Seeded random source shared by all samplers of one run.
///
/// Draws are built from raw 64-bit engine output rather than the standard
/// distribution classes, whose algorithms differ between library vendors,
/// so a seed reproduces the same sample sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform on [lo, hi]. Always consumes exactly one engine draw.
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller. Consumes two engine draws.
    double standard_normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 mix of (base, stream); gives decorrelated seeds for
/// independent replications derived from one user seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace otasync

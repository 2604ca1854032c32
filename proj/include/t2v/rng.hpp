// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace t2v {

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Seeded random stream with implementation-independent distributions, so a
/// (seed, purpose, index) triple produces the same draws on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0);

    /// Stream keyed by purpose and index, independent of any other stream
    /// derived from the same master seed.
    static RngStream derive(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index = 0);

    std::uint64_t next_u64() { return mEngine(); }
    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; consumes two draws per call.
    double normal();

    std::string serialize() const;
    static RngStream deserialize(const std::string& state);

    friend bool operator==(const RngStream& a, const RngStream& b) { return a.mEngine == b.mEngine; }

private:
    std::mt19937_64 mEngine;
};

}  // namespace t2v

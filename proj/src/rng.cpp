// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "t2v/error.hpp"

namespace t2v {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

RngStream::RngStream(std::uint64_t seed) : mEngine(seed) {}

RngStream RngStream::derive(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index) {
    std::uint64_t key = splitmix64(master_seed);
    key = splitmix64(key ^ fnv1a64(purpose));
    key = splitmix64(key ^ index);
    return RngStream(key);
}

double RngStream::uniform() {
    return static_cast<double>(mEngine() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string RngStream::serialize() const {
    std::ostringstream os;
    os << mEngine;
    return os.str();
}

RngStream RngStream::deserialize(const std::string& state) {
    RngStream stream;
    std::istringstream is(state);
    is >> stream.mEngine;
    if (!is) {
        throw ValidationError("RngStream: malformed serialized state");
    }
    return stream;
}

}  // namespace t2v

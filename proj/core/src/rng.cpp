// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ethmerge/error.hpp"

namespace ethmerge {

namespace {
    constexpr uint64_t rotl(uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(uint64_t seed) noexcept {
    uint64_t state = seed;
    for (auto& word : s_) {
        word = splitmix64(state);
    }
}

uint64_t Rng::next_u64() noexcept {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

uint64_t Rng::below(uint64_t bound) noexcept {
    if (bound <= 1) {
        return 0;
    }
    // rejection sampling on a mask covering bound - 1
    uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        const uint64_t candidate = next_u64() & mask;
        if (candidate < bound) {
            return candidate;
        }
    }
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

WeightedPicker::WeightedPicker(std::span<const double> weights) {
    if (weights.empty()) {
        fail(Errc::kInvalidConfig, "weighted picker needs at least one weight");
    }
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (const double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(Errc::kInvalidConfig, "weights must be positive and finite");
        }
        total += w;
        cumulative_.push_back(total);
    }
    for (auto& c : cumulative_) {
        c /= total;
    }
    cumulative_.back() = 1.0;
}

std::size_t WeightedPicker::pick(Rng& rng) const noexcept {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

}  // namespace ethmerge

// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ethmerge {

//! SplitMix64 step. Used to expand seeds and to derive per-stream seeds.
constexpr uint64_t splitmix64(uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

//! xoshiro256** 1.0 (Blackman & Vigna), state seeded from SplitMix64.
//!
//! Every distribution below is implemented here rather than through <random> so that
//! sequences are identical across standard libraries. Uniform doubles take the top 53 bits;
//! bounded integers use rejection on the top bits; normals use the Box-Muller transform.
class Rng {
  public:
    explicit Rng(uint64_t seed) noexcept;

    uint64_t next_u64() noexcept;

    //! Uniform in [0, 1).
    double uniform() noexcept;

    //! Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    //! Uniform integer in [0, bound). bound must be > 0.
    uint64_t below(uint64_t bound) noexcept;

    //! Standard normal deviate.
    double normal() noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

  private:
    uint64_t s_[4]{};
    double spare_normal_{0.0};
    bool has_spare_{false};
};

//! Draws indices proportionally to fixed positive weights via inverse-CDF binary search.
class WeightedPicker {
  public:
    explicit WeightedPicker(std::span<const double> weights);

    [[nodiscard]] std::size_t pick(Rng& rng) const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return cumulative_.size(); }

  private:
    std::vector<double> cumulative_;
};

//! Seed for an independent sub-stream (e.g. one tree of a forest).
constexpr uint64_t derive_seed(uint64_t master, uint64_t index) noexcept {
    uint64_t state = master ^ index;
    return splitmix64(state);
}

}  // namespace ethmerge

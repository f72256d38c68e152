// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ethmerge/chain.hpp"
#include "ethmerge/error.hpp"

namespace ethmerge {

//! First block produced under proof of stake.
inline constexpr uint64_t kMergeBlock = 15'537'394;
//! Last 1M proof-of-work blocks and first 1M proof-of-stake blocks.
inline constexpr BlockRange kDefaultPowRange{14'537'394, 15'537'393};
inline constexpr BlockRange kDefaultPosRange{15'537'394, 16'537'393};
//! Transaction corpus used for fee prediction.
inline constexpr BlockRange kDefaultPredictionRange{18'000'001, 18'020'000};

struct MinerProfile {
    Address producer;
    uint64_t blocks_produced{0};
    std::vector<uint64_t> block_numbers;  // strictly increasing
};

//! small < medium_min <= medium <= medium_max < large.
struct CategoryThresholds {
    uint64_t medium_min{10'000};
    uint64_t medium_max{100'000};
};

struct CategoryReport {
    uint64_t window_size{0};
    uint64_t large{0};
    uint64_t medium{0};
    uint64_t small{0};
    CategoryThresholds thresholds;

    [[nodiscard]] uint64_t total() const noexcept { return large + medium + small; }
};

struct ProducerRandomness {
    Address producer;
    std::size_t sample_size{0};
    //! Adjacent pairs (b[i+1] == b[i] + 1) over n - 1.
    double adjacency_rate{0.0};
    uint64_t max_run_length{0};
    //! n / (max - min + 1).
    double normalized_span{0.0};
};

struct RandomnessReport {
    std::vector<ProducerRandomness> producers;
    double mean_adjacency_rate{0.0};
    double mean_max_run_length{0.0};
    double mean_normalized_span{0.0};
};

std::size_t unique_producer_count(std::span<const BlockHeader> headers);

//! One profile per producer, ordered by address.
std::vector<MinerProfile> producer_profiles(std::span<const BlockHeader> headers);

CategoryReport categorize_counts(std::span<const uint64_t> counts, uint64_t window_size,
                                 const CategoryThresholds& thresholds = {});
CategoryReport categorize_producers(std::span<const BlockHeader> headers, const CategoryThresholds& thresholds = {});

//! The k profiles with most blocks; ties go to the lexicographically smaller address.
//! Throws kInsufficientProducers when fewer than k producers exist.
std::vector<MinerProfile> top_producers(std::span<const BlockHeader> headers, std::size_t k = 10);
std::vector<MinerProfile> top_profiles(std::vector<MinerProfile> profiles, std::size_t k);

//! Up to n block numbers, ascending, from the tail (from_end) or head of the profile.
std::vector<uint64_t> producer_block_sample(const MinerProfile& profile, std::size_t n = 50, bool from_end = false);

//! Throws kSampleTooShort for samples with fewer than two blocks. Samples must be ascending.
ProducerRandomness sample_randomness(std::span<const uint64_t> sample);
RandomnessReport randomness_metrics(std::span<const std::vector<uint64_t>> samples);

enum class Era { kPow, kPos };

std::string_view to_string(Era era) noexcept;

struct MinerAnalysisConfig {
    std::vector<uint64_t> windows{100'000, 500'000, 1'000'000};
    std::size_t top_k{10};
    std::size_t sample_size{50};
    CategoryThresholds thresholds;
};

struct TopEntry {
    Address producer;
    uint64_t blocks_produced{0};
};

struct WindowAnalysis {
    Era era{Era::kPow};
    uint64_t requested_size{0};
    //! Blocks actually present in the window.
    BlockRange range;
    uint64_t blocks{0};
    std::size_t unique_producers{0};
    CategoryReport categories;
    std::vector<TopEntry> top;
    RandomnessReport randomness;
};

//! Analyzes one window: a suffix of the era's headers for PoW, a prefix for PoS, mirroring
//! "last N PoW blocks" versus "first N PoS blocks". Samples come from the tail of each top
//! producer's blocks for PoW and the head for PoS. `headers` must be sorted by number.
//! When the window holds fewer than top_k producers, all of them are reported.
WindowAnalysis analyze_window(std::span<const BlockHeader> headers, Era era, uint64_t window,
                              const MinerAnalysisConfig& config);

}  // namespace ethmerge

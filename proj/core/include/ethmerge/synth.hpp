// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ethmerge/chain.hpp"
#include "ethmerge/fees.hpp"

// Deterministic synthetic chains and fee series. All randomness comes from ethmerge::Rng
// (xoshiro256** seeded through SplitMix64), so sequences are identical across platforms.

namespace ethmerge {

struct SynthChainConfig {
    std::size_t n_blocks{1000};
    //! Relative selection weights, one per producer; normalized internally.
    std::vector<double> producer_weights{1.0};
    //! Probability that a block reuses the previous block's producer.
    double stickiness{0.0};
    double missed_slot_rate{0.0};
    uint64_t seed{1};

    uint64_t first_block{1};
    uint64_t first_slot{0};
    uint64_t genesis_timestamp{1'606'824'023};
    uint64_t gas_limit{30'000'000};
    uint64_t active_validators{400'000};

    //! Throws kInvalidConfig.
    void validate() const;
};

//! Deterministic 20-byte address for producer index i.
Address synth_address(std::size_t index) noexcept;

//! Producer index per block. Uses only the producer stream of the seed, so it matches
//! gen_producer_sequence(config).headers[i].producer == synth_address(indices[i]).
std::vector<uint32_t> gen_producer_indices(const SynthChainConfig& config);

struct SynthChain {
    std::vector<BlockHeader> headers;
    std::vector<SlotRecord> slots;
};

//! Linked headers with producers plus a slot table whose missed slots occur at the configured
//! rate. Timestamps advance 12 s per slot.
SynthChain gen_producer_sequence(const SynthChainConfig& config);

struct SynthFeeConfig {
    std::size_t n_txs{5000};

    // Congestion c_t = phi * c_{t-1} + sigma * N(0,1), one step per block.
    double ar_coefficient{0.9};
    double congestion_noise{0.4};
    double initial_congestion{0.0};

    //! Block utilization is 0.5 + 0.45 tanh(c - demand_sensitivity * ln(bf / reference_bf)),
    //! so demand falls as the base fee rises above its reference level.
    double demand_sensitivity{1.0};
    //! Scales the base-fee update: bf' = bf * (1 + elasticity * (u - 0.5) / 4). 1 is EIP-1559.
    double elasticity{1.0};
    double initial_base_fee_gwei{20.0};

    // Tip per gas in gwei: tip_base * exp(tip_congestion_gain * c) * exp(tip_noise * N(0,1)).
    double tip_base_gwei{1.5};
    double tip_congestion_gain{0.8};
    double tip_noise{0.1};

    std::vector<uint64_t> gas_menu{21'000, 30'000, 46'000, 52'000, 65'000};
    std::size_t min_txs_per_block{2};
    std::size_t max_txs_per_block{8};
    std::size_t n_producers{64};
    double missed_slot_rate{0.01};

    uint64_t seed{7};
    uint64_t first_block{18'000'001};
    uint64_t first_slot{7'000'000};
    uint64_t genesis_timestamp{1'606'824'023};
    uint64_t gas_limit{30'000'000};
    uint64_t active_validators{800'000};

    //! Throws kInvalidConfig.
    void validate() const;
};

//! One generated transaction with the latent state it was drawn under.
struct SynthFeeRecord {
    FeeBreakdown fees;
    double congestion{0.0};
    double gas_ratio{0.0};
    uint64_t timestamp{0};
};

struct SynthFeeSeries {
    std::vector<SynthFeeRecord> records;
    //! The same transactions as chain fixtures (headers, txs, slots).
    ChainData chain;
};

SynthFeeSeries gen_fee_series(const SynthFeeConfig& config);

//! True q-quantile of the priority fee (gwei) for a transaction using `gas_used` gas under
//! congestion c, ignoring sub-wei rounding.
double true_priority_quantile(const SynthFeeConfig& config, double congestion, uint64_t gas_used, double q);

}  // namespace ethmerge

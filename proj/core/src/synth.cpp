// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/synth.hpp"

#include <cmath>

#include "ethmerge/error.hpp"
#include "ethmerge/rng.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

namespace {

    // Stream identifiers for derive_seed.
    constexpr uint64_t kProducerStream = 0;
    constexpr uint64_t kSlotStream = 1;
    constexpr uint64_t kCongestionStream = 2;
    constexpr uint64_t kTxStream = 3;

    constexpr uint64_t kSecondsPerSlot = 12;

    Hash32 synth_hash(uint64_t seed, uint64_t tag, uint64_t number) noexcept {
        Hash32 out;
        uint64_t state = derive_seed(seed, tag) ^ number;
        auto& bytes = out.bytes();
        for (std::size_t i = 0; i < bytes.size(); i += 8) {
            uint64_t word = splitmix64(state);
            for (std::size_t b = 0; b < 8; ++b) {
                bytes[i + b] = static_cast<uint8_t>(word >> (56 - 8 * b));
            }
        }
        return out;
    }

    // Appends missed slots at `rate` before each proposed slot.
    class SlotWriter {
      public:
        SlotWriter(uint64_t first_slot, double missed_rate, uint64_t seed, uint64_t active_validators)
            : slot_(first_slot), rate_(missed_rate), rng_(derive_seed(seed, kSlotStream)),
              active_(active_validators) {}

        // Returns the slot assigned to `block`.
        uint64_t propose(uint64_t block, std::vector<SlotRecord>& out) {
            while (rng_.bernoulli(rate_)) {
                out.push_back(SlotRecord{slot_, rng_.below(active_), std::nullopt, 0, active_});
                ++slot_;
            }
            const uint64_t committee = active_ / 32;
            const uint64_t votes = committee - rng_.below(committee / 20 + 1);
            out.push_back(SlotRecord{slot_, rng_.below(active_), block, votes, active_});
            return slot_++;
        }

      private:
        uint64_t slot_;
        double rate_;
        Rng rng_;
        uint64_t active_;
    };

}  // namespace

void SynthChainConfig::validate() const {
    if (producer_weights.empty()) {
        fail(Errc::kInvalidConfig, "producer weights must not be empty");
    }
    for (const double w : producer_weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(Errc::kInvalidConfig, "producer weights must be positive");
        }
    }
    if (!(stickiness >= 0.0 && stickiness < 1.0)) {
        fail(Errc::kInvalidConfig, "stickiness must be in [0, 1)");
    }
    if (!(missed_slot_rate >= 0.0 && missed_slot_rate < 1.0)) {
        fail(Errc::kInvalidConfig, "missed slot rate must be in [0, 1)");
    }
    if (active_validators < 32) {
        fail(Errc::kInvalidConfig, "need at least 32 active validators");
    }
}

Address synth_address(std::size_t index) noexcept {
    Address out;
    uint64_t state = 0x5eedadd500000000ULL ^ static_cast<uint64_t>(index);
    auto& bytes = out.bytes();
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i % 8 == 0) {
            state = splitmix64(state);
        }
        bytes[i] = static_cast<uint8_t>(state >> (8 * (i % 8)));
    }
    return out;
}

std::vector<uint32_t> gen_producer_indices(const SynthChainConfig& config) {
    config.validate();
    const WeightedPicker picker(config.producer_weights);
    Rng rng(derive_seed(config.seed, kProducerStream));
    std::vector<uint32_t> out;
    out.reserve(config.n_blocks);
    for (std::size_t i = 0; i < config.n_blocks; ++i) {
        if (i > 0 && config.stickiness > 0.0 && rng.bernoulli(config.stickiness)) {
            out.push_back(out.back());
        } else {
            out.push_back(static_cast<uint32_t>(picker.pick(rng)));
        }
    }
    return out;
}

SynthChain gen_producer_sequence(const SynthChainConfig& config) {
    const std::vector<uint32_t> producers = gen_producer_indices(config);
    std::vector<Address> addresses(config.producer_weights.size());
    for (std::size_t i = 0; i < addresses.size(); ++i) {
        addresses[i] = synth_address(i);
    }
    SynthChain chain;
    chain.headers.reserve(config.n_blocks);
    chain.slots.reserve(config.n_blocks + config.n_blocks / 8);
    SlotWriter slots(config.first_slot, config.missed_slot_rate, config.seed, config.active_validators);
    Rng gas_rng(derive_seed(config.seed, kTxStream));
    Hash32 parent = synth_hash(config.seed, 99, config.first_block - 1);
    for (std::size_t i = 0; i < config.n_blocks; ++i) {
        BlockHeader h;
        h.number = config.first_block + i;
        h.hash = synth_hash(config.seed, 99, h.number);
        h.parent_hash = parent;
        h.producer = addresses[producers[i]];
        const uint64_t slot = slots.propose(h.number, chain.slots);
        h.timestamp = config.genesis_timestamp + kSecondsPerSlot * slot;
        h.gas_limit = config.gas_limit;
        h.gas_used = gas_rng.below(config.gas_limit + 1);
        h.base_fee_per_gas = Wei(10) * kWeiPerGwei;
        parent = h.hash;
        chain.headers.push_back(h);
    }
    return chain;
}

void SynthFeeConfig::validate() const {
    if (!(ar_coefficient > -1.0 && ar_coefficient < 1.0)) {
        fail(Errc::kInvalidConfig, "AR(1) coefficient must be in (-1, 1)");
    }
    if (!(congestion_noise >= 0.0) || !(tip_noise >= 0.0) || !(demand_sensitivity >= 0.0)) {
        fail(Errc::kInvalidConfig, "noise scales and demand sensitivity must be >= 0");
    }
    if (!(elasticity >= 0.0)) {
        fail(Errc::kInvalidConfig, "elasticity must be >= 0");
    }
    if (!(initial_base_fee_gwei > 0.0) || !(tip_base_gwei >= 0.0)) {
        fail(Errc::kInvalidConfig, "base fee must be positive and tip base non-negative");
    }
    if (gas_menu.empty() || min_txs_per_block == 0 || max_txs_per_block < min_txs_per_block) {
        fail(Errc::kInvalidConfig, "gas menu and transactions-per-block bounds are invalid");
    }
    for (const uint64_t g : gas_menu) {
        if (g == 0 || g > gas_limit) {
            fail(Errc::kInvalidConfig, "gas menu entries must be in [1, gas_limit]");
        }
    }
    if (n_producers == 0 || gas_limit < 2) {
        fail(Errc::kInvalidConfig, "need at least one producer and a gas limit >= 2");
    }
    if (!(missed_slot_rate >= 0.0 && missed_slot_rate < 1.0)) {
        fail(Errc::kInvalidConfig, "missed slot rate must be in [0, 1)");
    }
    if (active_validators < 32) {
        fail(Errc::kInvalidConfig, "need at least 32 active validators");
    }
}

SynthFeeSeries gen_fee_series(const SynthFeeConfig& config) {
    config.validate();
    SynthFeeSeries out;
    out.records.reserve(config.n_txs);
    out.chain.txs.reserve(config.n_txs);

    Rng congestion_rng(derive_seed(config.seed, kCongestionStream));
    Rng tx_rng(derive_seed(config.seed, kTxStream));
    Rng producer_rng(derive_seed(config.seed, kProducerStream));
    SlotWriter slots(config.first_slot, config.missed_slot_rate, config.seed, config.active_validators);

    const double reference_bf = config.initial_base_fee_gwei;
    // Elasticity in millionths keeps the base-fee update in exact integer arithmetic.
    const auto elasticity_ppm = static_cast<int64_t>(std::llround(config.elasticity * 1e6));
    const uint64_t target = config.gas_limit / 2;

    Wei base_fee = Wei(static_cast<uint64_t>(std::llround(config.initial_base_fee_gwei * 1e9)));
    double c = config.initial_congestion;
    Hash32 parent = synth_hash(config.seed, 99, config.first_block - 1);
    uint64_t tx_serial = 0;

    for (uint64_t number = config.first_block; out.records.size() < config.n_txs; ++number) {
        if (number != config.first_block) {
            c = config.ar_coefficient * c + config.congestion_noise * congestion_rng.normal();
        }
        const double bf_gwei = to_gwei(base_fee);
        const double pressure = c - config.demand_sensitivity * std::log(bf_gwei / reference_bf);
        const double u = 0.5 + 0.45 * std::tanh(pressure);

        BlockHeader h;
        h.number = number;
        h.hash = synth_hash(config.seed, 99, number);
        h.parent_hash = parent;
        h.producer = synth_address(producer_rng.below(config.n_producers));
        const uint64_t slot = slots.propose(number, out.chain.slots);
        h.timestamp = config.genesis_timestamp + kSecondsPerSlot * slot;
        h.gas_limit = config.gas_limit;
        h.gas_used = static_cast<uint64_t>(std::llround(u * static_cast<double>(config.gas_limit)));
        h.base_fee_per_gas = base_fee;
        parent = h.hash;

        const std::size_t span = config.max_txs_per_block - config.min_txs_per_block + 1;
        const std::size_t n_in_block = config.min_txs_per_block + tx_rng.below(span);
        const double tip_center = config.tip_base_gwei * std::exp(config.tip_congestion_gain * c);
        for (std::size_t k = 0; k < n_in_block && out.records.size() < config.n_txs; ++k) {
            TxRecord tx;
            tx.tx_hash = synth_hash(config.seed, 100, tx_serial++);
            tx.block_number = number;
            tx.gas_used = config.gas_menu[tx_rng.below(config.gas_menu.size())];
            const double tip_gwei = tip_center * std::exp(config.tip_noise * tx_rng.normal());
            tx.gas_price = base_fee + Wei(static_cast<uint64_t>(std::llround(tip_gwei * 1e9)));
            tx.value = Wei(tx_rng.below(1'000'000)) * kWeiPerGwei;
            out.records.push_back(SynthFeeRecord{derive_fees(tx, h), c, u, h.timestamp});
            out.chain.txs.push_back(std::move(tx));
        }
        out.chain.headers.push_back(h);

        // EIP-1559 style update: delta = bf * (gas_used - target) / target / 8, scaled by elasticity.
        if (elasticity_ppm != 0) {
            const bool up = h.gas_used >= target;
            const uint64_t dev = up ? h.gas_used - target : target - h.gas_used;
            const Wei delta = base_fee * dev * elasticity_ppm / (Wei(target) * 8 * 1'000'000);
            if (up) {
                base_fee += delta;
            } else {
                base_fee -= delta;
            }
            if (base_fee < 1) {
                base_fee = 1;
            }
        }
    }
    return out;
}

double true_priority_quantile(const SynthFeeConfig& config, double congestion, uint64_t gas_used, double q) {
    const double tip = config.tip_base_gwei * std::exp(config.tip_congestion_gain * congestion) *
                       std::exp(config.tip_noise * normal_quantile(q));
    return tip * static_cast<double>(gas_used);
}

}  // namespace ethmerge

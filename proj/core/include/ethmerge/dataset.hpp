// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ethmerge/chain.hpp"
#include "ethmerge/cleaning.hpp"
#include "ethmerge/fees.hpp"
#include "ethmerge/model_spec.hpp"
#include "ethmerge/types.hpp"

namespace ethmerge {

//! Feature construction settings plus the statistics fitted during a build.
//!
//! Candidate features, in order:
//!   gas_ratio, base_fee_per_gas, tx_gas_used,
//!   mean_txn_fee_<w>..., mean_priority_fee_<w>... (one per lag window, previous w transactions),
//!   block_tx_count, total_votes, active_validators, seconds_since_prev_block, tod_sin, tod_cos.
//! Fees and gas prices are in gwei. Candidates with zero spread on the training partition are
//! dropped; `names` lists the retained ones.
struct FeatureConfig {
    std::vector<std::size_t> lag_windows{10, 100, 1000};
    //! Window of the last-N fee estimate stored next to each row.
    std::size_t baseline_window{1000};
    double train_fraction{0.8};
    CleaningPolicy cleaning{3.0, 1.5, {"base_fee", "priority_fee", "txn_fee", "gas_price"}};

    // Filled in by build_feature_rows.
    std::vector<std::string> names;
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<std::string> dropped;

    //! Throws kInvalidConfig on zero windows or a train fraction outside (0, 1].
    void validate() const;
    //! max(lag_windows), or 0 without lag features.
    [[nodiscard]] std::size_t warmup() const noexcept;
    [[nodiscard]] std::vector<std::string> candidate_names() const;
};

//! One model-ready transaction. Features are standardized; fee targets are gwei.
struct FeatureRow {
    Hash32 tx_hash;
    uint64_t block_number{0};
    uint64_t timestamp{0};
    std::vector<double> features;

    double base_fee{0.0};
    double priority_fee{0.0};
    double txn_fee{0.0};

    //! Last-N mean of each fee over the chronological history before this row (NaN when the
    //! history is shorter than the window).
    double est_base_fee{0.0};
    double est_priority_fee{0.0};
    double est_txn_fee{0.0};

    Wei base_fee_wei{0};
    Wei priority_fee_wei{0};
    Wei txn_fee_wei{0};

    //! Regression label for a target. txn_time regresses txn_fee over future contexts.
    [[nodiscard]] double target(Target t) const noexcept;
    [[nodiscard]] double estimate(Target t) const noexcept;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

enum class Split { kTrain, kTest };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct Dataset {
    FeatureConfig config;
    std::vector<FeatureRow> train;
    std::vector<FeatureRow> test;

    std::size_t input_rows{0};
    //! Leading transactions without full lag history, excluded from both partitions.
    std::size_t warmup_rows{0};
    //! Chronological index of the first test candidate.
    std::size_t boundary_index{0};
    std::optional<uint64_t> boundary_block;

    //! Fitted on the training partition and applied unchanged to the test partition.
    CleaningStats cleaning_stats;
    CleaningReport train_cleaning;
    CleaningReport test_cleaning;

    [[nodiscard]] const std::vector<FeatureRow>& partition(Split split) const noexcept {
        return split == Split::kTrain ? train : test;
    }
};

//! Joins fees to block headers and beacon slots (via bsmap), builds lag and context features,
//! splits temporally, cleans and standardizes.
//! Throws kUnmappedBlock when a fee's block has no slot, kUnknownBlock when its header is absent.
Dataset build_feature_rows(std::span<const FeeBreakdown> fees, std::span<const BlockHeader> blocks,
                           std::span<const SlotRecord> slots, const FeatureConfig& config);

//! derive_fees over every transaction, then build_feature_rows.
Dataset build_dataset(const ChainData& chain, const FeatureConfig& config);

inline constexpr std::string_view kDatasetCsv = "dataset.csv";
inline constexpr std::string_view kFeaturesJson = "features.json";

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
//! Throws kIoFailure on unreadable or malformed files.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace ethmerge

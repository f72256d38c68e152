// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ethmerge/dataset.hpp"
#include "ethmerge/metrics.hpp"
#include "ethmerge/predictor.hpp"

namespace ethmerge {

//! One evaluated row: actual label, last-N estimate and model prediction.
struct SeriesPoint {
    uint64_t block_number{0};
    uint64_t timestamp{0};
    double actual{0.0};
    double estimated{0.0};
    double predicted{0.0};
};

struct Evaluation {
    EvalReport model;
    //! Same metrics for the last-N estimate, over rows where it is defined.
    std::optional<EvalReport> baseline;
    //! Per-row fees, or per-horizon time offsets (seconds from horizon start) for txn_time.
    std::vector<SeriesPoint> series;
};

inline constexpr std::size_t kDefaultHorizonBlocks = 10;

//! Scores a model on one partition. Fee targets are compared row by row. For txn_time the
//! partition's first transaction of each block forms consecutive horizons of `horizon_blocks`
//! blocks; in each, the fee-minimizing time chosen from actual fees, from the last-N estimate,
//! and by predict_min_fee_time are compared as offsets from the horizon start.
Evaluation evaluate_model(const TrainedModel& model, const Dataset& dataset, Split split,
                          std::size_t horizon_blocks = kDefaultHorizonBlocks);

}  // namespace ethmerge

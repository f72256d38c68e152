// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ethmerge/dataset.hpp"
#include "ethmerge/model_spec.hpp"
#include "ethmerge/tree.hpp"

namespace ethmerge {

//! Row-major feature vectors with their column names.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};

FeatureMatrix feature_matrix(const Dataset& dataset, Split split);
std::vector<double> target_vector(const Dataset& dataset, Split split, Target target);

struct BaselineParams {
    double value{0.0};
};

struct LinearParams {
    double intercept{0.0};
    std::vector<double> coefficients;
    //! Non-zero when the design was rank deficient and a ridge solve was used instead.
    double ridge_lambda{0.0};
};

struct KnnParams {
    std::size_t k{5};
    std::size_t dim{0};
    std::vector<double> rows;  // row-major training features
    std::vector<double> targets;
};

//! Trees combined as init + scale * sum (boosting) or their mean (forests, single tree).
struct EnsembleParams {
    double init{0.0};
    double learning_rate{1.0};
    bool average{true};
    std::vector<RegressionTree> trees;
};

using ModelParams = std::variant<BaselineParams, LinearParams, KnnParams, EnsembleParams>;

//! Multiplicative uplift of a priority-fee prediction per congestion decile. For each decile the
//! ratios actual/predicted of the training rows give uplift(q) = Q_q(ratio) / Q_0.5(ratio), so the
//! median is the identity.
struct CalibrationTable {
    //! Congestion feature; empty when the model has none and a single bucket is used.
    std::string feature;
    std::vector<double> edges;  // interior decile boundaries in feature space
    std::vector<double> grid;   // quantile levels 0.50, 0.51, ..., 0.99
    std::vector<std::vector<double>> uplift;  // [bucket][grid index]
    std::vector<std::size_t> counts;

    [[nodiscard]] std::size_t bucket(double x) const noexcept;
    //! Linear interpolation in q; levels above the grid use the last entry.
    [[nodiscard]] double uplift_at(std::size_t bucket, double q) const noexcept;
};

struct ModelMetadata {
    std::vector<std::string> feature_names;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    uint64_t train_first_block{0};
    uint64_t train_last_block{0};
    //! Chain timestamp of the last training row, so the file depends only on its inputs.
    uint64_t fit_timestamp{0};
    std::size_t train_rows{0};
    //! Training MSE after each boosting stage.
    std::vector<double> stage_mse;
    std::vector<std::string> notes;
};

struct TrainedModel {
    ModelSpec spec;
    ModelMetadata metadata;
    ModelParams params;
    std::optional<CalibrationTable> calibration;
};

inline constexpr int kModelFormatVersion = 1;

//! Fits on a raw matrix. Requires at least max(k, 1) rows; throws kInvalidSpec otherwise.
TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x, std::span<const double> y);

//! Fits on the training partition (at least max(2k, 10) rows) and records dataset metadata.
//! Priority-fee models also get a calibration table.
TrainedModel train(const ModelSpec& spec, const Dataset& dataset);

//! Throws kFeatureMismatch unless names match the training features in order.
std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& rows);
//! Unchecked single-row prediction.
double predict_row(const TrainedModel& model, std::span<const double> row);

//! Prediction times the calibrated uplift for the context's congestion decile (gwei).
//! Throws kTargetMismatch, kUncalibratedModel, kInvalidConfig (q outside [0.5, 1)).
double recommend_priority_fee(const TrainedModel& model, const FeatureMatrix& context, double q);

//! Timestamp whose predicted fee is smallest, earliest on ties. Throws kEmptyHorizon,
//! kTargetMismatch (not a txn_fee/txn_time model) and kInvalidConfig (timestamps not increasing).
uint64_t predict_min_fee_time(const TrainedModel& model, std::span<const uint64_t> timestamps,
                              const FeatureMatrix& contexts);

std::string serialize_model(const TrainedModel& model);
//! Throws kVersionMismatch or kCorruptModelFile.
TrainedModel deserialize_model(std::string_view text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace ethmerge

// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ethmerge {

enum class ModelKind {
    kBaseline,
    kLinear,
    kKnn,
    kTree,
    kRandomForest,
    kExtraTrees,
    kGradientBoosting,
    //! Second-order boosting with L2-shrunk leaves (the "XGB" variant).
    kGradientBoostingRegularized,
};

enum class Target { kBaseFee, kPriorityFee, kTxnFee, kTxnTime };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Target target) noexcept;

//! Accepts canonical names ("gradient_boosting") and short forms ("gb", "xgb", "rf", "et",
//! "knn"/"kn", "lr", "dt").
std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept;
std::optional<Target> parse_target(std::string_view text) noexcept;

using Hyperparameters = std::map<std::string, double>;

//! Defaults: k=5; max_depth=8, min_leaf=20; random forests 100 bootstrapped trees with
//! feature_fraction 1/3; extra trees 100 trees over all features; boosting 200 stages at
//! learning_rate 0.1; l2_lambda 1 for the regularized variant.
Hyperparameters default_hyperparameters(ModelKind kind);

struct ModelSpec {
    ModelKind kind{ModelKind::kGradientBoosting};
    Hyperparameters hyperparameters;  // overrides on top of the defaults
    uint64_t seed{42};
    Target target{Target::kPriorityFee};

    //! Override if present, default otherwise. Throws kInvalidSpec for names the kind does not use.
    [[nodiscard]] double get(const std::string& name) const;

    //! Defaults merged with overrides.
    [[nodiscard]] Hyperparameters resolved() const;

    //! Throws kInvalidSpec on unknown names or out-of-range values.
    void validate() const;
};

}  // namespace ethmerge

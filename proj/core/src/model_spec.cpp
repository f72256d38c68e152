// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/model_spec.hpp"

#include <cmath>

#include "ethmerge/error.hpp"

namespace ethmerge {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::kBaseline: return "baseline";
        case ModelKind::kLinear: return "linear";
        case ModelKind::kKnn: return "knn";
        case ModelKind::kTree: return "tree";
        case ModelKind::kRandomForest: return "random_forest";
        case ModelKind::kExtraTrees: return "extra_trees";
        case ModelKind::kGradientBoosting: return "gradient_boosting";
        case ModelKind::kGradientBoostingRegularized: return "gradient_boosting_regularized";
    }
    return "unknown";
}

std::string_view to_string(Target target) noexcept {
    switch (target) {
        case Target::kBaseFee: return "base_fee";
        case Target::kPriorityFee: return "priority_fee";
        case Target::kTxnFee: return "txn_fee";
        case Target::kTxnTime: return "txn_time";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept {
    static constexpr std::pair<std::string_view, ModelKind> kNames[] = {
        {"baseline", ModelKind::kBaseline},
        {"linear", ModelKind::kLinear},
        {"lr", ModelKind::kLinear},
        {"knn", ModelKind::kKnn},
        {"kn", ModelKind::kKnn},
        {"tree", ModelKind::kTree},
        {"dt", ModelKind::kTree},
        {"random_forest", ModelKind::kRandomForest},
        {"rf", ModelKind::kRandomForest},
        {"extra_trees", ModelKind::kExtraTrees},
        {"et", ModelKind::kExtraTrees},
        {"gradient_boosting", ModelKind::kGradientBoosting},
        {"gb", ModelKind::kGradientBoosting},
        {"gradient_boosting_regularized", ModelKind::kGradientBoostingRegularized},
        {"xgb", ModelKind::kGradientBoostingRegularized},
    };
    for (const auto& [name, kind] : kNames) {
        if (name == text) {
            return kind;
        }
    }
    return std::nullopt;
}

std::optional<Target> parse_target(std::string_view text) noexcept {
    for (const Target t : {Target::kBaseFee, Target::kPriorityFee, Target::kTxnFee, Target::kTxnTime}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    return std::nullopt;
}

Hyperparameters default_hyperparameters(ModelKind kind) {
    switch (kind) {
        case ModelKind::kBaseline: return {{"window", 1000}};
        case ModelKind::kLinear: return {};
        case ModelKind::kKnn: return {{"k", 5}};
        case ModelKind::kTree: return {{"max_depth", 8}, {"min_leaf", 20}};
        case ModelKind::kRandomForest:
            return {{"max_depth", 8}, {"min_leaf", 20}, {"n_estimators", 100}, {"feature_fraction", 1.0 / 3.0},
                    {"bootstrap", 1}};
        case ModelKind::kExtraTrees:
            return {{"max_depth", 8}, {"min_leaf", 20}, {"n_estimators", 100}, {"feature_fraction", 1.0}};
        case ModelKind::kGradientBoosting:
            return {{"max_depth", 8}, {"min_leaf", 20}, {"n_estimators", 200}, {"learning_rate", 0.1}};
        case ModelKind::kGradientBoostingRegularized:
            return {{"max_depth", 8},
                    {"min_leaf", 20},
                    {"n_estimators", 200},
                    {"learning_rate", 0.1},
                    {"l2_lambda", 1.0}};
    }
    return {};
}

Hyperparameters ModelSpec::resolved() const {
    Hyperparameters out = default_hyperparameters(kind);
    for (const auto& [name, value] : hyperparameters) {
        if (!out.contains(name)) {
            fail(Errc::kInvalidSpec, "hyperparameter '" + name + "' does not apply to " + std::string(to_string(kind)));
        }
        out[name] = value;
    }
    return out;
}

double ModelSpec::get(const std::string& name) const {
    const Hyperparameters all = resolved();
    const auto it = all.find(name);
    if (it == all.end()) {
        fail(Errc::kInvalidSpec, "hyperparameter '" + name + "' does not apply to " + std::string(to_string(kind)));
    }
    return it->second;
}

void ModelSpec::validate() const {
    const Hyperparameters all = resolved();
    auto integral_at_least = [&](const char* name, double lo) {
        const auto it = all.find(name);
        if (it == all.end()) {
            return;
        }
        if (!(it->second >= lo) || std::floor(it->second) != it->second) {
            fail(Errc::kInvalidSpec, std::string(name) + " must be an integer >= " + std::to_string(static_cast<int>(lo)));
        }
    };
    integral_at_least("k", 1);
    integral_at_least("window", 1);
    integral_at_least("max_depth", 0);
    integral_at_least("min_leaf", 1);
    integral_at_least("n_estimators", 1);
    if (const auto it = all.find("learning_rate"); it != all.end() && !(it->second > 0.0 && it->second <= 1.0)) {
        fail(Errc::kInvalidSpec, "learning_rate must be in (0, 1]");
    }
    if (const auto it = all.find("feature_fraction"); it != all.end() && !(it->second > 0.0 && it->second <= 1.0)) {
        fail(Errc::kInvalidSpec, "feature_fraction must be in (0, 1]");
    }
    if (const auto it = all.find("l2_lambda"); it != all.end() && !(it->second >= 0.0)) {
        fail(Errc::kInvalidSpec, "l2_lambda must be >= 0");
    }
    if (const auto it = all.find("bootstrap"); it != all.end() && it->second != 0.0 && it->second != 1.0) {
        fail(Errc::kInvalidSpec, "bootstrap must be 0 or 1");
    }
}

}  // namespace ethmerge

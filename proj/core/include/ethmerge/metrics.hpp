// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace ethmerge {

struct EvalReport {
    double rmse{0.0};
    double mae{0.0};
    //! 1 - SSres/SStot; absent when the actual values have zero variance.
    std::optional<double> r2;
    std::size_t n{0};
    std::string target;
    std::string model;
};

//! RMSE, MAE and R^2 with pairwise-summed residuals. Throws kLengthMismatch on unequal or
//! empty inputs.
EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted);

}  // namespace ethmerge

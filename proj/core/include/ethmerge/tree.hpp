// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ethmerge {

struct TreeNode {
    //! Split feature, or -1 for a leaf.
    int32_t feature{-1};
    //! Rows with x[feature] <= threshold go left.
    double threshold{0.0};
    int32_t left{-1};
    int32_t right{-1};
    double value{0.0};
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    [[nodiscard]] double predict(std::span<const double> row) const noexcept;
    [[nodiscard]] std::size_t leaf_count() const noexcept;
    [[nodiscard]] std::size_t depth() const noexcept;
};

//! Column-major copy of a row-major feature matrix with per-feature sort orders, shared by
//! every tree fitted on the same rows.
class ColumnData {
  public:
    explicit ColumnData(std::span<const std::vector<double>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return n_rows_; }
    [[nodiscard]] std::size_t features() const noexcept { return columns_.size(); }
    [[nodiscard]] const std::vector<double>& column(std::size_t f) const noexcept { return columns_[f]; }
    //! Row indices ordered by (value, index).
    [[nodiscard]] const std::vector<uint32_t>& order(std::size_t f) const noexcept { return orders_[f]; }

  private:
    std::size_t n_rows_{0};
    std::vector<std::vector<double>> columns_;
    std::vector<std::vector<uint32_t>> orders_;
};

struct TreeParams {
    std::size_t max_depth{8};
    //! Minimum summed hessian (row weight) per leaf.
    double min_leaf{20.0};
    //! L2 penalty on leaf values; 0 gives plain least-squares CART leaves.
    double l2_lambda{0.0};
    //! Fraction of non-constant features examined at each node (at least one). More are drawn
    //! when none of them yields a valid split.
    double feature_fraction{1.0};
    //! Extra-trees style: one uniform threshold in (min, max) per examined feature.
    bool random_thresholds{false};
};

//! Fits one tree by greedy second-order splitting. For row i, `gradient[i]` is the weighted
//! target sum contribution and `hessian[i]` the weight: leaf value G/(H + lambda), split gain
//! GL^2/(HL + lambda) + GR^2/(HR + lambda) - G^2/(H + lambda). Rows with zero hessian are ignored.
//! With gradient = w*y, hessian = w and lambda = 0 this is weighted variance-reduction CART.
RegressionTree build_tree(const ColumnData& data, std::span<const double> gradient, std::span<const double> hessian,
                          const TreeParams& params, uint64_t seed);

}  // namespace ethmerge

// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ethmerge/error.hpp"
#include "ethmerge/rng.hpp"

namespace ethmerge {

double RegressionTree::predict(std::span<const double> row) const noexcept {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const TreeNode& n = nodes[at];
        at = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[at].value;
}

std::size_t RegressionTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::size_t RegressionTree::depth() const noexcept {
    if (nodes.empty()) {
        return 0;
    }
    std::vector<std::size_t> level(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].feature >= 0) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
            deepest = std::max(deepest, level[i] + 1);
        }
    }
    return deepest;
}

ColumnData::ColumnData(std::span<const std::vector<double>> rows) : n_rows_(rows.size()) {
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    columns_.assign(width, std::vector<double>(n_rows_));
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (rows[i].size() != width) {
            fail(Errc::kFeatureMismatch, "ragged feature matrix");
        }
        for (std::size_t f = 0; f < width; ++f) {
            columns_[f][i] = rows[i][f];
        }
    }
    orders_.resize(width);
    for (std::size_t f = 0; f < width; ++f) {
        auto& order = orders_[f];
        order.resize(n_rows_);
        std::iota(order.begin(), order.end(), 0U);
        const auto& col = columns_[f];
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return col[a] < col[b] || (col[a] == col[b] && a < b);
        });
    }
}

namespace {

    constexpr double kMinGain = 1e-12;

    struct Split {
        double gain{0.0};
        int32_t feature{-1};
        double threshold{0.0};
    };

    class Builder {
      public:
        Builder(const ColumnData& data, std::span<const double> g, std::span<const double> h, const TreeParams& p,
                uint64_t seed)
            : data_(data), g_(g), h_(h), params_(p), rng_(seed), go_left_(data.rows(), 0) {
            const std::size_t nf = data.features();
            sorted_.resize(nf);
            for (std::size_t f = 0; f < nf; ++f) {
                sorted_[f].reserve(data.rows());
                for (const uint32_t r : data.order(f)) {
                    if (h_[r] > 0.0) {
                        sorted_[f].push_back(r);
                    }
                }
            }
            active_rows_ = nf == 0 ? 0 : sorted_[0].size();
            if (nf == 0) {
                for (std::size_t r = 0; r < data.rows(); ++r) {
                    if (h_[r] > 0.0) {
                        ++active_rows_;
                    }
                }
            }
            candidates_.resize(nf);
            std::iota(candidates_.begin(), candidates_.end(), 0U);
            n_sampled_ = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(params_.feature_fraction * static_cast<double>(nf) + 1e-9)));
            n_sampled_ = std::min(n_sampled_, nf);
            scratch_.resize(data.rows());
        }

        RegressionTree run() {
            double G = 0.0;
            double H = 0.0;
            if (data_.features() > 0) {
                for (const uint32_t r : sorted_[0]) {
                    G += g_[r];
                    H += h_[r];
                }
            } else {
                for (std::size_t r = 0; r < data_.rows(); ++r) {
                    G += g_[r];
                    H += h_[r];
                }
            }
            tree_.nodes.emplace_back();
            grow(0, 0, active_rows_, 0, G, H);
            return std::move(tree_);
        }

      private:
        [[nodiscard]] double score(double G, double H) const noexcept { return G * G / (H + params_.l2_lambda); }

        void grow(std::size_t node, std::size_t begin, std::size_t end, std::size_t depth, double G, double H) {
            tree_.nodes[node].value = H + params_.l2_lambda > 0.0 ? G / (H + params_.l2_lambda) : 0.0;
            if (depth >= params_.max_depth || H < 2.0 * params_.min_leaf || end - begin < 2 || data_.features() == 0) {
                return;
            }
            const Split best = find_split(begin, end, G, H);
            if (best.feature < 0) {
                return;
            }
            // Mark rows, then stable-partition every feature's segment.
            const auto f_best = static_cast<std::size_t>(best.feature);
            const auto& col = data_.column(f_best);
            double GL = 0.0;
            double HL = 0.0;
            std::size_t n_left = 0;
            for (std::size_t i = begin; i < end; ++i) {
                const uint32_t r = sorted_[f_best][i];
                const bool left = col[r] <= best.threshold;
                go_left_[r] = left ? 1 : 0;
                if (left) {
                    GL += g_[r];
                    HL += h_[r];
                    ++n_left;
                }
            }
            for (auto& seg : sorted_) {
                std::size_t l = begin;
                std::size_t s = 0;
                for (std::size_t i = begin; i < end; ++i) {
                    const uint32_t r = seg[i];
                    if (go_left_[r]) {
                        seg[l++] = r;
                    } else {
                        scratch_[s++] = r;
                    }
                }
                std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(s),
                          seg.begin() + static_cast<std::ptrdiff_t>(l));
            }
            const auto left_id = static_cast<int32_t>(tree_.nodes.size());
            tree_.nodes.emplace_back();
            const auto right_id = static_cast<int32_t>(tree_.nodes.size());
            tree_.nodes.emplace_back();
            tree_.nodes[node].feature = best.feature;
            tree_.nodes[node].threshold = best.threshold;
            tree_.nodes[node].left = left_id;
            tree_.nodes[node].right = right_id;
            grow(static_cast<std::size_t>(left_id), begin, begin + n_left, depth + 1, GL, HL);
            grow(static_cast<std::size_t>(right_id), begin + n_left, end, depth + 1, G - GL, H - HL);
        }

        // Examines features in random order. Constant features do not count toward the sample
        // size, and the search continues past it until some valid split is found.
        Split find_split(std::size_t begin, std::size_t end, double G, double H) {
            const std::size_t nf = candidates_.size();
            const bool subsample = n_sampled_ < nf;
            if (subsample) {
                std::iota(candidates_.begin(), candidates_.end(), 0U);
            }
            const double parent = score(G, H);
            const double min_gain = kMinGain * (1.0 + std::abs(parent));
            Split best;
            std::size_t examined = 0;
            for (std::size_t c = 0; c < nf; ++c) {
                if (examined >= n_sampled_ && best.feature >= 0) {
                    break;
                }
                if (subsample) {
                    std::swap(candidates_[c], candidates_[c + rng_.below(nf - c)]);
                }
                const uint32_t f = candidates_[c];
                const auto& seg = sorted_[f];
                const auto& col = data_.column(f);
                const double lo = col[seg[begin]];
                const double hi = col[seg[end - 1]];
                if (!(lo < hi)) {
                    continue;
                }
                ++examined;
                if (params_.random_thresholds) {
                    const double t = rng_.uniform(lo, hi);
                    double GL = 0.0;
                    double HL = 0.0;
                    for (std::size_t i = begin; i < end && col[seg[i]] <= t; ++i) {
                        GL += g_[seg[i]];
                        HL += h_[seg[i]];
                    }
                    const double HR = H - HL;
                    if (HL < params_.min_leaf || HR < params_.min_leaf) {
                        continue;
                    }
                    const double gain = score(GL, HL) + score(G - GL, HR) - parent;
                    if (gain > min_gain && gain > best.gain) {
                        best = Split{gain, static_cast<int32_t>(f), t};
                    }
                    continue;
                }
                double GL = 0.0;
                double HL = 0.0;
                for (std::size_t i = begin; i + 1 < end; ++i) {
                    const uint32_t r = seg[i];
                    GL += g_[r];
                    HL += h_[r];
                    const double x = col[r];
                    const double next = col[seg[i + 1]];
                    if (x == next) {
                        continue;
                    }
                    const double HR = H - HL;
                    if (HL < params_.min_leaf) {
                        continue;
                    }
                    if (HR < params_.min_leaf) {
                        break;
                    }
                    const double gain = score(GL, HL) + score(G - GL, HR) - parent;
                    if (gain > min_gain && gain > best.gain) {
                        double t = x + (next - x) / 2.0;
                        if (!(t < next)) {
                            t = x;
                        }
                        best = Split{gain, static_cast<int32_t>(f), t};
                    }
                }
            }
            return best;
        }

        const ColumnData& data_;
        std::span<const double> g_;
        std::span<const double> h_;
        const TreeParams& params_;
        Rng rng_;
        std::vector<uint8_t> go_left_;
        std::vector<std::vector<uint32_t>> sorted_;
        std::vector<uint32_t> scratch_;
        std::vector<uint32_t> candidates_;
        std::size_t n_sampled_{0};
        std::size_t active_rows_{0};
        RegressionTree tree_;
    };

}  // namespace

RegressionTree build_tree(const ColumnData& data, std::span<const double> gradient, std::span<const double> hessian,
                          const TreeParams& params, uint64_t seed) {
    if (gradient.size() != data.rows() || hessian.size() != data.rows()) {
        fail(Errc::kLengthMismatch, "gradient/hessian length differs from row count");
    }
    if (!(params.feature_fraction > 0.0 && params.feature_fraction <= 1.0) || !(params.l2_lambda >= 0.0) ||
        !(params.min_leaf > 0.0)) {
        fail(Errc::kInvalidSpec, "invalid tree parameters");
    }
    return Builder(data, gradient, hessian, params, seed).run();
}

}  // namespace ethmerge

// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/cleaning.hpp"

#include <algorithm>
#include <cmath>

#include "ethmerge/error.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

std::vector<double> z_scores(std::span<const double> values) {
    if (values.size() < 2) {
        fail(Errc::kDegenerateDistribution, "z-scores need at least two values");
    }
    const double mu = mean(values);
    const double sigma = population_stddev(values);
    if (!(sigma > 0.0)) {
        fail(Errc::kDegenerateDistribution, "zero standard deviation");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - mu) / sigma;
    }
    return out;
}

double standardized_iqr(std::span<const double> values) {
    if (values.size() < 4) {
        fail(Errc::kInvalidConfig, "standardized IQR needs at least four values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double q50 = percentile_sorted(sorted, 0.50);
    if (q50 == 0.0) {
        fail(Errc::kZeroMedian, "median is zero");
    }
    return (percentile_sorted(sorted, 0.75) - percentile_sorted(sorted, 0.25)) / q50;
}

void CleaningPolicy::validate() const {
    if (!(z_threshold > 0.0) || !(iqr_fence_multiplier > 0.0)) {
        fail(Errc::kInvalidConfig, "z threshold and fence multiplier must be positive");
    }
}

bool has_missing(const ScreenRow& row) noexcept {
    return std::any_of(row.begin(), row.end(), [](const auto& v) { return !v || !std::isfinite(*v); });
}

bool CleaningStats::flagged_by_z(const ScreenRow& row) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (std::abs((*row[c] - col.mean) / col.stddev) > policy.z_threshold) {
            return true;
        }
    }
    return false;
}

bool CleaningStats::flagged_by_fence(const ScreenRow& row) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        const double spread = policy.iqr_fence_multiplier * (col.q75 - col.q25);
        if (*row[c] < col.q25 - spread || *row[c] > col.q75 + spread) {
            return true;
        }
    }
    return false;
}

bool CleaningStats::is_outlier(const ScreenRow& row) const { return flagged_by_z(row) || flagged_by_fence(row); }

CleaningStats fit_cleaning(std::span<const ScreenRow> rows, std::span<const std::size_t> indices,
                           const CleaningPolicy& policy) {
    policy.validate();
    CleaningStats stats;
    stats.policy = policy;
    const std::size_t width = policy.attributes.size();
    std::vector<double> column(indices.size());
    for (std::size_t c = 0; c < width; ++c) {
        for (std::size_t i = 0; i < indices.size(); ++i) {
            column[i] = *rows[indices[i]][c];
        }
        ColumnStats cs;
        cs.mean = mean(column);
        cs.stddev = population_stddev(column);
        if (!(cs.stddev > 0.0)) {
            fail(Errc::kDegenerateDistribution, "screened column '" + policy.attributes[c] + "' is constant");
        }
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        cs.q25 = percentile_sorted(sorted, 0.25);
        cs.q50 = percentile_sorted(sorted, 0.50);
        cs.q75 = percentile_sorted(sorted, 0.75);
        stats.columns.push_back(cs);
    }
    return stats;
}

CleaningResult clean(std::span<const ScreenRow> rows, const CleaningPolicy& policy) {
    policy.validate();
    for (const auto& row : rows) {
        if (row.size() != policy.attributes.size()) {
            fail(Errc::kInvalidConfig, "row width does not match screened attributes");
        }
    }
    CleaningResult result;
    result.report.input_rows = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (has_missing(rows[i])) {
            ++result.report.removed_missing;
        } else {
            result.kept.push_back(i);
        }
    }

    for (;;) {
        result.stats = fit_cleaning(rows, result.kept, policy);
        ++result.report.passes;
        std::vector<std::size_t> survivors;
        survivors.reserve(result.kept.size());
        for (const std::size_t i : result.kept) {
            const bool by_z = result.stats.flagged_by_z(rows[i]);
            const bool by_fence = result.stats.flagged_by_fence(rows[i]);
            result.report.flagged_z += by_z ? 1 : 0;
            result.report.flagged_fence += by_fence ? 1 : 0;
            if (by_z || by_fence) {
                ++result.report.removed_outliers;
            } else {
                survivors.push_back(i);
            }
        }
        if (survivors.size() == result.kept.size()) {
            break;
        }
        result.kept = std::move(survivors);
    }
    result.report.kept_rows = result.kept.size();
    return result;
}

std::vector<std::size_t> apply_cleaning(std::span<const ScreenRow> rows, const CleaningStats& stats,
                                        CleaningReport* report) {
    CleaningReport local;
    local.input_rows = rows.size();
    local.passes = 1;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != stats.columns.size()) {
            fail(Errc::kInvalidConfig, "row width does not match screened attributes");
        }
        if (has_missing(rows[i])) {
            ++local.removed_missing;
            continue;
        }
        const bool by_z = stats.flagged_by_z(rows[i]);
        const bool by_fence = stats.flagged_by_fence(rows[i]);
        local.flagged_z += by_z ? 1 : 0;
        local.flagged_fence += by_fence ? 1 : 0;
        if (by_z || by_fence) {
            ++local.removed_outliers;
        } else {
            kept.push_back(i);
        }
    }
    local.kept_rows = kept.size();
    if (report) {
        *report = local;
    }
    return kept;
}

}  // namespace ethmerge

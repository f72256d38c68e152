// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ethmerge {

//! (x - mean) / sigma with the population sigma. Throws kDegenerateDistribution when sigma is 0
//! or fewer than two values are given.
std::vector<double> z_scores(std::span<const double> values);

//! (Q75 - Q25) / Q50 with type-7 percentiles. Throws kZeroMedian when Q50 == 0 and
//! kInvalidConfig for fewer than four values.
double standardized_iqr(std::span<const double> values);

struct CleaningPolicy {
    double z_threshold{3.0};
    double iqr_fence_multiplier{1.5};
    //! Screened columns; the i-th value of every row belongs to attributes[i].
    std::vector<std::string> attributes;

    void validate() const;
};

//! One row to screen. nullopt or a non-finite value means missing.
using ScreenRow = std::vector<std::optional<double>>;

struct ColumnStats {
    double mean{0.0};
    double stddev{0.0};
    double q25{0.0};
    double q50{0.0};
    double q75{0.0};
};

//! Thresholds fitted on one partition, applicable to any other.
struct CleaningStats {
    CleaningPolicy policy;
    std::vector<ColumnStats> columns;

    [[nodiscard]] bool is_outlier(const ScreenRow& row) const;
    [[nodiscard]] bool flagged_by_z(const ScreenRow& row) const;
    [[nodiscard]] bool flagged_by_fence(const ScreenRow& row) const;
};

struct CleaningReport {
    std::size_t input_rows{0};
    std::size_t removed_missing{0};
    //! Rows flagged by each rule; a row may be flagged by both.
    std::size_t flagged_z{0};
    std::size_t flagged_fence{0};
    std::size_t removed_outliers{0};
    std::size_t kept_rows{0};
    std::size_t passes{0};
};

struct CleaningResult {
    std::vector<std::size_t> kept;  // ascending input indices
    CleaningReport report;
    CleaningStats stats;            // fitted on the kept rows
};

[[nodiscard]] bool has_missing(const ScreenRow& row) noexcept;

//! Fits per-column mean/sigma and quartiles over `rows[indices]`.
CleaningStats fit_cleaning(std::span<const ScreenRow> rows, std::span<const std::size_t> indices,
                           const CleaningPolicy& policy);

//! Drops rows with any missing screened value, then repeatedly drops rows with |z| above the
//! threshold or outside [Q25 - m IQR, Q75 + m IQR] until a pass removes nothing, so cleaning a
//! cleaned set is a no-op. Kept rows keep their input order.
CleaningResult clean(std::span<const ScreenRow> rows, const CleaningPolicy& policy);

//! Screens rows against previously fitted stats (a single pass, no refitting).
std::vector<std::size_t> apply_cleaning(std::span<const ScreenRow> rows, const CleaningStats& stats,
                                        CleaningReport* report = nullptr);

}  // namespace ethmerge

// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/metrics.hpp"

#include <cmath>
#include <vector>

#include "ethmerge/error.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size() || actual.empty()) {
        fail(Errc::kLengthMismatch, "evaluate needs equal, non-empty inputs (got " + std::to_string(actual.size()) +
                                        " and " + std::to_string(predicted.size()) + ")");
    }
    const std::size_t n = actual.size();
    std::vector<double> abs_err(n);
    std::vector<double> sq_err(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = actual[i] - predicted[i];
        abs_err[i] = std::abs(e);
        sq_err[i] = e * e;
    }
    const double mu = mean(actual);
    std::vector<double> sq_dev(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = actual[i] - mu;
        sq_dev[i] = d * d;
    }
    const double ss_res = pairwise_sum(sq_err);
    const double ss_tot = pairwise_sum(sq_dev);

    EvalReport report;
    report.n = n;
    report.mae = pairwise_sum(abs_err) / static_cast<double>(n);
    report.rmse = std::sqrt(ss_res / static_cast<double>(n));
    if (ss_tot > 0.0) {
        report.r2 = 1.0 - ss_res / ss_tot;
    }
    return report;
}

}  // namespace ethmerge

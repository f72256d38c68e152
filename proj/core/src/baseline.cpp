// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/baseline.hpp"

#include <string>

#include "ethmerge/error.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

double baseline_estimate(std::span<const double> history, std::size_t n, std::size_t window) {
    if (window == 0) {
        fail(Errc::kInvalidConfig, "baseline window must be positive");
    }
    if (n < window || n > history.size()) {
        fail(Errc::kInsufficientHistory, "need " + std::to_string(window) + " fees before index " + std::to_string(n));
    }
    return pairwise_sum(history.subspan(n - window, window)) / static_cast<double>(window);
}

}  // namespace ethmerge

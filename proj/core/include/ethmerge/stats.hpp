// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace ethmerge {

//! Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
double pairwise_sum(std::span<const double> values) noexcept;

double mean(std::span<const double> values) noexcept;

//! Population standard deviation (divides by n), two-pass.
double population_stddev(std::span<const double> values) noexcept;

//! Percentile by linear interpolation between order statistics ("type 7"):
//! h = (n - 1) p, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
//! `sorted` must be ascending and non-empty; p in [0, 1].
double percentile_sorted(std::span<const double> sorted, double p) noexcept;

//! Same as percentile_sorted on a sorted copy.
double percentile(std::span<const double> values, double p);

//! Inverse of the standard normal CDF (Acklam's rational approximation refined by one
//! Halley step). p in (0, 1).
double normal_quantile(double p) noexcept;

}  // namespace ethmerge

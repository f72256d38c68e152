// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace ethmerge {

inline constexpr std::size_t kBaselineWindow = 1000;

//! Fee estimate for position n of a chronological history: the arithmetic mean of the
//! `window` values immediately before n, i.e. history[n - window .. n - 1].
//! Throws kInsufficientHistory when fewer than `window` values precede n.
double baseline_estimate(std::span<const double> history, std::size_t n, std::size_t window = kBaselineWindow);

}  // namespace ethmerge

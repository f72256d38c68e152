// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ethmerge/evaluation.hpp"

namespace ethmerge::cli {

//! Every ceil(N / sample)-th point, starting with the first. Throws kInvalidConfig when
//! sample is 0.
std::vector<SeriesPoint> systematic_sample(std::span<const SeriesPoint> series, std::size_t sample);

//! index,block_number,timestamp,actual,estimated,predicted; undefined values are empty cells.
std::string series_csv(std::span<const SeriesPoint> points);

struct ChartLabels {
    std::string title;
    std::string y_axis;
};

//! Line chart of the three series: actual solid black, estimated red dashes, predicted green
//! dashes. Lines break where a value is undefined.
std::string series_svg(std::span<const SeriesPoint> points, const ChartLabels& labels);

}  // namespace ethmerge::cli

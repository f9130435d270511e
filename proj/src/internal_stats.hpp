// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cellarma::internal {

inline constexpr double kMadConsistency = 1.4826;

/// Median of the values; takes its argument by value and reorders it.
/// Callers must pass a non-empty vector.
inline double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

/// Median absolute deviation about center, scaled by 1.4826 for
/// consistency at the normal distribution.
inline double scaled_mad(const std::vector<double>& values, double center) {
  std::vector<double> deviations(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    deviations[i] = std::abs(values[i] - center);
  }
  return kMadConsistency * median_of(std::move(deviations));
}

}  // namespace cellarma::internal

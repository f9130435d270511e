// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cellarma/arma.hpp"

namespace cellarma {

enum class FilterId { UGY, UHS };

/// Per-cell outlier flags produced by one filter run, together with the
/// filter identity and its base quantile alpha.
struct FlagVector {
  std::vector<bool> flags;
  FilterId filter_id = FilterId::UGY;
  double alpha = 0.0;

  int flagged_count() const;
};

/// Cross-tabulation of flags against ground truth; the four counts sum to
/// the series length.
struct ConfusionCounts {
  int clean_not_flagged = 0;
  int clean_flagged = 0;
  int outlier_not_flagged = 0;
  int outlier_flagged = 0;

  int total() const {
    return clean_not_flagged + clean_flagged + outlier_not_flagged + outlier_flagged;
  }
};

/// Center by the median and scale by 1.4826 * MAD. Throws
/// DegenerateSeriesError when the MAD is zero.
TimeSeries robust_standardize(const TimeSeries& series);

/// Robust location and scale used inside the filters: median/MAD start
/// refined by a few density-ratio reweighting passes, so heavy cellwise
/// contamination (including point masses) does not inflate the scale.
struct LocationScale {
  double location = 0.0;
  double scale = 1.0;
};
LocationScale filter_location_scale(const std::vector<double>& values);

/// Gervini-Yohai adaptive tail filter. Standardizes the series, measures
/// the maximal exceedance d of the empirical tail over the half-normal
/// reference beyond the alpha quantile, and flags the ceil(T*d) cells with
/// largest absolute standardized value.
FlagVector gy_filter(const TimeSeries& series, double alpha);

/// Halfspace-depth filter. Standardizes the series, converts each cell to
/// the depth statistic u = 1 - 2*min(F(z), 1-F(z)) (uniform under the
/// normal reference), applies the same adaptive exceedance rule beyond the
/// alpha quantile, and flags every cell whose statistic reaches the
/// maximizing order statistic -- i.e. all cells with the most extreme
/// depths, tied blocks included.
FlagVector hs_filter(const TimeSeries& series, double alpha);

/// Cross-tabulate filter flags against per-cell ground truth.
ConfusionCounts flag_metrics(const FlagVector& flags, const std::vector<bool>& truth);

}  // namespace cellarma

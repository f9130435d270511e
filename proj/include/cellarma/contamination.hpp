// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cellarma/arma.hpp"

namespace cellarma {

enum class OutlierKind { additive, innovative };

/// One outlier: kind, 1-based time index tau in 1..T, magnitude h in
/// series units.
struct OutlierSpec {
  OutlierKind kind;
  int time;
  double magnitude;
};

/// Observed series y, the latent clean series z it was built from, the
/// ledger of injected outliers and the per-cell ground truth.
/// cell_truth[t] is true iff |observed[t] - clean[t]| > 1e-12.
struct ContaminatedSeries {
  TimeSeries observed;
  TimeSeries clean;
  std::vector<OutlierSpec> ledger;
  std::vector<bool> cell_truth;
};

/// Cellwise contamination process: independent Bernoulli indicators for
/// additive and innovative outliers plus a white-noise magnitude process.
struct BernoulliContamSpec {
  double p_additive = 0.0;
  double p_innovative = 0.0;
  double magnitude_sd = 1.0;
};

/// Add the outliers in specs to the clean series. An additive outlier adds
/// h at its time only; an innovative outlier adds h * psi_{t-tau} for all
/// t >= tau, psi being the power-series coefficients of Theta(B)/Phi(B).
/// Effects of multiple specs sum.
ContaminatedSeries inject(const ArmaModel& model, const TimeSeries& clean,
                          const std::vector<OutlierSpec>& specs);

/// Innovative-outlier representation of an additive outlier: IO specs at
/// times tau..tau+horizon with magnitudes h * pi_k, pi = Phi(B)/Theta(B).
/// Exactly zero magnitudes are dropped, so a pure AR(p) model yields the
/// exact p+1 term equivalent; for q >= 1 the list is a truncation.
std::vector<OutlierSpec> ao_to_io(const ArmaModel& model, const OutlierSpec& ao, int horizon);

/// Simulate a clean series and contaminate it cell by cell: at each t an
/// AO fires with probability p_additive and an IO with p_innovative, both
/// with the same N(0, magnitude_sd^2) magnitude draw. Deterministic given
/// seed; the ledger records every injected outlier.
ContaminatedSeries bernoulli_contaminate(const ArmaModel& model, int length,
                                         const BernoulliContamSpec& spec, std::uint64_t seed);

/// Replace every period-th cell, starting at the 1-based index start, by
/// the fixed value. Replacement, not addition; the ledger stores the
/// induced differences as AO magnitudes.
ContaminatedSeries periodic_contaminate(const TimeSeries& clean, int period, double value,
                                        int start);

}  // namespace cellarma

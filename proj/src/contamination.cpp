// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/contamination.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "cellarma/lagpoly.hpp"

namespace cellarma {

namespace {

constexpr double kTruthTolerance = 1e-12;

void check_spec(const OutlierSpec& spec, int length) {
  if (spec.time < 1 || spec.time > length) {
    throw std::invalid_argument("outlier time " + std::to_string(spec.time) +
                                " outside 1.." + std::to_string(length));
  }
  if (!std::isfinite(spec.magnitude)) {
    throw std::invalid_argument("outlier magnitude must be finite");
  }
}

std::vector<bool> truth_mask(const std::vector<double>& observed,
                             const std::vector<double>& clean) {
  std::vector<bool> mask(observed.size());
  for (std::size_t t = 0; t < observed.size(); ++t) {
    mask[t] = std::abs(observed[t] - clean[t]) > kTruthTolerance;
  }
  return mask;
}

}  // namespace

ContaminatedSeries inject(const ArmaModel& model, const TimeSeries& clean,
                          const std::vector<OutlierSpec>& specs) {
  const int length = clean.length();
  std::vector<double> observed = clean.values;

  // psi-weights are only needed when at least one IO is present; compute
  // them once, long enough to reach the end of the series.
  std::vector<double> psi;
  for (const OutlierSpec& spec : specs) {
    check_spec(spec, length);
    if (spec.kind == OutlierKind::innovative && psi.empty()) {
      psi = divide(model.ma_polynomial(), model.ar_polynomial(), length - 1).weights;
    }
  }

  for (const OutlierSpec& spec : specs) {
    if (spec.kind == OutlierKind::additive) {
      observed[spec.time - 1] += spec.magnitude;
    } else {
      for (int t = spec.time; t <= length; ++t) {
        observed[t - 1] += spec.magnitude * psi[t - spec.time];
      }
    }
  }

  ContaminatedSeries out;
  out.observed = TimeSeries{std::move(observed), SeriesOrigin::contaminated};
  out.clean = clean;
  out.ledger = specs;
  out.cell_truth = truth_mask(out.observed.values, out.clean.values);
  return out;
}

std::vector<OutlierSpec> ao_to_io(const ArmaModel& model, const OutlierSpec& ao, int horizon) {
  if (ao.kind != OutlierKind::additive) {
    throw std::invalid_argument("ao_to_io expects an additive outlier");
  }
  if (horizon < 0) {
    throw std::invalid_argument("horizon must be non-negative");
  }
  const SeriesWeights pi = divide(model.ar_polynomial(), model.ma_polynomial(), horizon);
  std::vector<OutlierSpec> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int k = 0; k <= horizon; ++k) {
    const double magnitude = ao.magnitude * pi.weights[k];
    if (magnitude == 0.0) {
      continue;
    }
    out.push_back(OutlierSpec{OutlierKind::innovative, ao.time + k, magnitude});
  }
  return out;
}

ContaminatedSeries bernoulli_contaminate(const ArmaModel& model, int length,
                                         const BernoulliContamSpec& spec, std::uint64_t seed) {
  if (spec.p_additive < 0.0 || spec.p_innovative < 0.0 ||
      spec.p_additive + spec.p_innovative > 1.0) {
    throw std::invalid_argument(
        "contamination probabilities must be non-negative with p_additive + p_innovative <= 1");
  }
  if (!(spec.magnitude_sd > 0.0)) {
    throw std::invalid_argument("magnitude_sd must be positive");
  }

  const TimeSeries clean = simulate(model, length, seed);

  // Decouple the contamination stream from the simulation stream so the
  // same seed yields the same clean path under any contamination spec.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> magnitude(0.0, spec.magnitude_sd);

  std::vector<OutlierSpec> specs;
  for (int t = 1; t <= length; ++t) {
    // Draw all three variates every step so the indicator streams stay
    // aligned across different probability settings.
    const double u_additive = unit(rng);
    const double u_innovative = unit(rng);
    const double h = magnitude(rng);
    if (u_additive < spec.p_additive) {
      specs.push_back(OutlierSpec{OutlierKind::additive, t, h});
    }
    if (u_innovative < spec.p_innovative) {
      specs.push_back(OutlierSpec{OutlierKind::innovative, t, h});
    }
  }
  return inject(model, clean, specs);
}

ContaminatedSeries periodic_contaminate(const TimeSeries& clean, int period, double value,
                                        int start) {
  const int length = clean.length();
  if (period < 1) {
    throw std::invalid_argument("period must be at least 1");
  }
  if (start < 1 || start > period) {
    throw std::invalid_argument("start " + std::to_string(start) + " outside 1.." +
                                std::to_string(period));
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument("replacement value must be finite");
  }

  std::vector<double> observed = clean.values;
  std::vector<OutlierSpec> ledger;
  for (int t = start; t <= length; t += period) {
    observed[t - 1] = value;
    ledger.push_back(OutlierSpec{OutlierKind::additive, t, value - clean.values[t - 1]});
  }

  ContaminatedSeries out;
  out.observed = TimeSeries{std::move(observed), SeriesOrigin::contaminated};
  out.clean = clean;
  out.ledger = std::move(ledger);
  out.cell_truth = truth_mask(out.observed.values, out.clean.values);
  return out;
}

}  // namespace cellarma

// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cellarma/lagpoly.hpp"

namespace cellarma {

enum class SeriesOrigin { clean, contaminated, residual };

struct TimeSeries {
  std::vector<double> values;
  SeriesOrigin origin = SeriesOrigin::clean;

  int length() const { return static_cast<int>(values.size()); }
};

/// Causal and invertible ARMA(p,q) model
///   Phi(B) z_t = Theta(B) a_t,   a_t ~ N(0, sigma^2),
/// with Phi(B) = 1 - phi1 B - ... - phip B^p and
/// Theta(B) = 1 + theta1 B + ... + thetaq B^q.
/// Construction rejects parameters whose polynomials have roots on or
/// inside the unit circle, and non-positive sigma.
class ArmaModel {
 public:
  ArmaModel(std::vector<double> phi, std::vector<double> theta, double sigma);

  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& theta() const { return theta_; }
  double sigma() const { return sigma_; }
  int p() const { return static_cast<int>(phi_.size()); }
  int q() const { return static_cast<int>(theta_.size()); }

  LagPolynomial ar_polynomial() const { return LagPolynomial::autoregressive(phi_); }
  LagPolynomial ma_polynomial() const { return LagPolynomial::moving_average(theta_); }

 private:
  std::vector<double> phi_;
  std::vector<double> theta_;
  double sigma_;
};

inline constexpr int kDefaultBurnIn = 500;

/// Simulate length observations of the model, seeded and reproducible.
/// Draws burn_in + length Gaussian innovations, runs the ARMA recursion
/// from zero initial conditions and discards the first burn_in values.
TimeSeries simulate(const ArmaModel& model, int length, std::uint64_t seed,
                    int burn_in = kDefaultBurnIn);

/// Innovation-side process r_t solving Theta(B) r_t = Phi(B) y_t forward
/// in t with pre-sample y and r set to zero (conditional residuals).
TimeSeries innovations(const ArmaModel& model, const TimeSeries& series);

/// Inverse of innovations: rebuild the observation series from residuals
/// through the MA-side recursion with zero pre-sample values.
TimeSeries reconstruct(const ArmaModel& model, const TimeSeries& residuals);

}  // namespace cellarma

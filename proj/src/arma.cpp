// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/arma.hpp"

#include <random>
#include <stdexcept>

namespace cellarma {

ArmaModel::ArmaModel(std::vector<double> phi, std::vector<double> theta, double sigma)
    : phi_(std::move(phi)), theta_(std::move(theta)), sigma_(sigma) {
  if (sigma_ <= 0.0) throw std::invalid_argument("ArmaModel: sigma must be > 0");
  if (!is_stable(ar_polynomial()))
    throw std::invalid_argument("ArmaModel: AR polynomial has roots on or inside the unit circle");
  if (!is_stable(ma_polynomial()))
    throw std::invalid_argument("ArmaModel: MA polynomial has roots on or inside the unit circle");
}

TimeSeries simulate(const ArmaModel& model, int length, std::uint64_t seed, int burn_in) {
  if (length < 1) throw std::invalid_argument("simulate: length must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");

  const int total = burn_in + length;
  const int p = model.p();
  const int q = model.q();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, model.sigma());

  std::vector<double> a(total);
  for (double& v : a) v = gauss(rng);

  std::vector<double> z(total, 0.0);
  for (int t = 0; t < total; ++t) {
    double acc = a[t];
    for (int i = 1; i <= p && t - i >= 0; ++i) acc += model.phi()[i - 1] * z[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) acc += model.theta()[j - 1] * a[t - j];
    z[t] = acc;
  }

  TimeSeries out;
  out.values.assign(z.begin() + burn_in, z.end());
  out.origin = SeriesOrigin::clean;
  return out;
}

TimeSeries innovations(const ArmaModel& model, const TimeSeries& series) {
  // Theta(B) r_t = Phi(B) y_t  =>  r_t = y_t - sum phi_i y_{t-i} - sum theta_j r_{t-j}.
  const int n = series.length();
  const int p = model.p();
  const int q = model.q();

  TimeSeries out;
  out.values.resize(n);
  out.origin = SeriesOrigin::residual;
  const auto& y = series.values;
  auto& r = out.values;
  for (int t = 0; t < n; ++t) {
    double acc = y[t];
    for (int i = 1; i <= p && t - i >= 0; ++i) acc -= model.phi()[i - 1] * y[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) acc -= model.theta()[j - 1] * r[t - j];
    r[t] = acc;
  }
  return out;
}

TimeSeries reconstruct(const ArmaModel& model, const TimeSeries& residuals) {
  const int n = residuals.length();
  const int p = model.p();
  const int q = model.q();

  TimeSeries out;
  out.values.resize(n);
  out.origin = SeriesOrigin::clean;
  const auto& r = residuals.values;
  auto& y = out.values;
  for (int t = 0; t < n; ++t) {
    double acc = r[t];
    for (int i = 1; i <= p && t - i >= 0; ++i) acc += model.phi()[i - 1] * y[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) acc += model.theta()[j - 1] * r[t - j];
    y[t] = acc;
  }
  return out;
}

}  // namespace cellarma

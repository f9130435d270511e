// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/lagpoly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellarma {

LagPolynomial::LagPolynomial(std::vector<double> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) throw std::invalid_argument("lag polynomial needs at least c0");
}

LagPolynomial LagPolynomial::autoregressive(const std::vector<double>& phi) {
  std::vector<double> c(phi.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < phi.size(); ++i) c[i + 1] = -phi[i];
  return LagPolynomial(std::move(c));
}

LagPolynomial LagPolynomial::moving_average(const std::vector<double>& theta) {
  std::vector<double> c(theta.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) c[i + 1] = theta[i];
  return LagPolynomial(std::move(c));
}

SeriesWeights divide(const LagPolynomial& numerator, const LagPolynomial& denominator,
                     int order) {
  if (order < 0) throw std::invalid_argument("divide: order must be >= 0");
  if (denominator.coeffs[0] != 1.0)
    throw std::invalid_argument("divide: denominator constant term must be 1");

  const auto& num = numerator.coeffs;
  const auto& den = denominator.coeffs;
  const int dden = denominator.degree();

  std::vector<double> w(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    double acc = k <= numerator.degree() ? num[k] : 0.0;
    for (int j = 1; j <= std::min(k, dden); ++j) acc -= den[j] * w[k - j];
    w[k] = acc;
  }
  return SeriesWeights{std::move(w)};
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

bool is_stable(const LagPolynomial& poly) {
  // Drop trailing zero coefficients so the companion matrix is well posed.
  std::vector<double> c = poly.coeffs;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d == 0) return true;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  constexpr double tol = 1e-9;
  for (int i = 0; i < d; ++i) {
    if (std::abs(solver.eigenvalues()[i]) <= 1.0 + tol) return false;
  }
  return true;
}

}  // namespace cellarma

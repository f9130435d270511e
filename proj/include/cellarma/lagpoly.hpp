// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace cellarma {

/// Finite polynomial in the backshift operator B:
///   c0 + c1*B + c2*B^2 + ... + cd*B^d.
/// Model polynomials (AR and MA sides of an ARMA model) have c0 == 1.
struct LagPolynomial {
  std::vector<double> coeffs;  // c0..cd

  LagPolynomial() : coeffs{1.0} {}
  explicit LagPolynomial(std::vector<double> c);

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  /// AR polynomial 1 - phi1*B - ... - phip*B^p.
  static LagPolynomial autoregressive(const std::vector<double>& phi);
  /// MA polynomial 1 + theta1*B + ... + thetaq*B^q.
  static LagPolynomial moving_average(const std::vector<double>& theta);
};

/// Leading coefficients w0..wK of a formal power series in B.
struct SeriesWeights {
  std::vector<double> weights;  // w0..wK

  int order() const { return static_cast<int>(weights.size()) - 1; }
};

/// First order+1 coefficients of the power series numerator/denominator.
/// The denominator must have constant term 1 (normalized model polynomial);
/// the recursion is w_k = num_k - sum_{j=1..min(k,deg den)} den_j * w_{k-j}.
SeriesWeights divide(const LagPolynomial& numerator, const LagPolynomial& denominator,
                     int order);

/// Polynomial product a*b, full length a.size()+b.size()-1.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

/// True iff every complex root of c0 + c1*x + ... + cd*x^d lies strictly
/// outside the unit circle. Roots within 1e-9 of the circle count as
/// unstable, so causality/invertibility checks err on the safe side.
bool is_stable(const LagPolynomial& poly);

}  // namespace cellarma

// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cellarma/arma.hpp"
#include "cellarma/filters.hpp"

namespace cellarma {

/// Lagged embedding of a series: row r holds (y_t, y_{t-1}, ..., y_{t-p})
/// for t = p+1+r (1-based), so the first column is the response and the
/// matrix is Hankel-structured. missing_mask marks cells inherited from
/// flagged series cells.
struct EmbeddedMatrix {
  Eigen::MatrixXd values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing_mask;
  int p = 0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool has_missing() const { return missing_mask.any(); }
};

/// Robust multivariate location/scatter estimate. scatter = scale^2 times
/// the det-1 shape matrix the fixed point converged to; iterations counts
/// the fixed-point steps taken.
struct LocationScatter {
  Eigen::VectorXd location;
  Eigen::MatrixXd scatter;
  double scale = 0.0;
  int iterations = 0;
};

/// Side information accumulated along an estimation pipeline.
struct FitDiagnostics {
  int iterations = 0;     // estimator fixed-point iterations
  int flagged_cells = 0;  // series cells flagged by the filter
  int rows_used = 0;      // embedding rows handed to the estimator
  std::optional<ConfusionCounts> confusion;  // filter vs truth when known
};

/// AR parameter estimate: coefficients, innovation standard deviation, a
/// label identifying the producing method, and diagnostics.
struct ArFit {
  std::vector<double> phi;
  double sigma = 0.0;
  std::string method_id;
  FitDiagnostics diagnostics;
};

/// ARMA parameter estimate with the step-3 regression residuals.
struct ArmaFit {
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma = 0.0;
  std::vector<double> residuals;
};

/// Biased (positive-semidefinite) sample autocovariances gamma(0..max_lag).
std::vector<double> autocovariance(const TimeSeries& series, int max_lag);

/// Solve the Yule-Walker equations for given autocovariances gamma(0..order).
/// Exposed separately so exact autocovariances can be fed directly.
ArFit yule_walker_from_gamma(const std::vector<double>& gamma, int order);

/// Yule-Walker AR(order) fit from the sample autocovariances.
ArFit yule_walker(const TimeSeries& series, int order);

/// Default long-AR order for hannan_rissanen: max(ceil(log(T)^2/4), 2*max(p,q)).
int hannan_rissanen_default_order(int length, int p, int q);

/// Three-step Hannan-Rissanen ARMA(p, q) estimate: long AR(m) by
/// Yule-Walker, residual proxies r_t = y_t - sum phi_i y_{t-i}, then least
/// squares of y_t on p lagged observations and q lagged proxies.
ArmaFit hannan_rissanen(const TimeSeries& series, int p, int q, int m);

/// Build the (T-p) x (p+1) lagged matrix; when flags are given, every
/// flagged series cell masks each matrix cell it occupies.
EmbeddedMatrix embed(const TimeSeries& series, int p, const FlagVector* flags = nullptr);

/// Keep only rows with no masked cells. Throws InsufficientDataError when
/// fewer than p+2 rows survive.
EmbeddedMatrix complete_cases(const EmbeddedMatrix& matrix);

/// Tukey biweight loss: 1 - (1 - (u/c)^2)^3 capped at 1; bounded, even.
double tukey_rho(double u, double c);

/// Companion weight w(u) = psi(u)/u up to a constant: (1 - (u/c)^2)^2
/// inside [-c, c], zero outside.
double tukey_weight(double u, double c);

/// Tuning constant c solving E[rho_c(||Z||)] = b for Z standard normal in
/// dim dimensions, via chi-distribution quadrature and bisection.
double consistency_constant(int dim, double b);

/// M-scale of the distances: s solving (1/n) sum rho(d_i/s, c_i) = b.
double mscale(const std::vector<double>& d, const std::vector<double>& c, double b);
double mscale(const std::vector<double>& d, double c, double b);

/// S-estimator of multivariate location/scatter with Tukey biweight and
/// breakdown parameter b, from a deterministic median / pairwise-covariance
/// start. Requires a fully observed matrix.
LocationScatter s_estimator(const EmbeddedMatrix& matrix, double b);

/// Generalized S-estimator for a matrix with missing cells: partial
/// Mahalanobis distances with per-pattern consistency constants and
/// conditional-expectation completion of missing blocks.
LocationScatter gse(const EmbeddedMatrix& matrix, double b);

/// AR coefficients from a (p+1)-variate scatter with the first coordinate
/// as response: phi = Sigma_xx^-1 sigma_xy, sigma^2 = Sigma_yy -
/// sigma_xy' phi (the Yule-Walker identity).
ArFit scatter_to_ar(const LocationScatter& est, int p);

/// Filter -> embed -> GSE -> AR extraction. When truth is given, the
/// filter's confusion counts are recorded in the diagnostics.
ArFit artsgs(const TimeSeries& series, int p, FilterId filter_id, double alpha,
             const std::vector<bool>* truth = nullptr);

/// Filter -> embed -> complete cases -> S-estimator -> AR extraction.
ArFit ars(const TimeSeries& series, int p, FilterId filter_id, double alpha,
          const std::vector<bool>* truth = nullptr);

/// No-filter baseline: S-estimator on the full embedding. Mimics a
/// rowwise-robust fit that never flags cells, so outlier propagation hits
/// it with full force.
ArFit nofilter_s(const TimeSeries& series, int p);

}  // namespace cellarma

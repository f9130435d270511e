// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "cellarma/errors.hpp"
#include "internal_stats.hpp"

namespace cellarma {

namespace {

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kBreakdown = 0.5;
constexpr int kFixedPointCap = 200;
constexpr double kFixedPointTol = 1e-8;

// ---------------------------------------------------------------------
// Deterministic start: coordinatewise medians plus pairwise
// Gnanadesikan-Kettenring covariances, eigenvalue-floored.
// ---------------------------------------------------------------------

struct StartEstimate {
  Eigen::VectorXd location;
  Eigen::MatrixXd scatter;
};

std::vector<double> observed_column(const Eigen::MatrixXd& matrix, const MaskMatrix& mask,
                                    Eigen::Index column) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(matrix.rows()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (!mask(i, column)) {
      values.push_back(matrix(i, column));
    }
  }
  return values;
}

StartEstimate gk_start(const Eigen::MatrixXd& matrix, const MaskMatrix& mask) {
  const Eigen::Index dim = matrix.cols();
  StartEstimate start;
  start.location.resize(dim);
  start.scatter.resize(dim, dim);

  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::vector<double> column = observed_column(matrix, mask, j);
    if (column.empty()) {
      throw InsufficientDataError("column " + std::to_string(j) + " has no observed cells");
    }
    start.location(j) = internal::median_of(column);
    const double mad = internal::scaled_mad(column, start.location(j));
    start.scatter(j, j) = mad * mad;
  }

  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      std::vector<double> sums;
      std::vector<double> diffs;
      for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        if (!mask(i, j) && !mask(i, k)) {
          sums.push_back(matrix(i, j) + matrix(i, k));
          diffs.push_back(matrix(i, j) - matrix(i, k));
        }
      }
      if (sums.empty()) {
        throw InsufficientDataError("columns " + std::to_string(j) + " and " +
                                    std::to_string(k) + " are never jointly observed");
      }
      const double s_sum = internal::scaled_mad(sums, internal::median_of(sums));
      const double s_diff = internal::scaled_mad(diffs, internal::median_of(diffs));
      start.scatter(j, k) = start.scatter(k, j) = (s_sum * s_sum - s_diff * s_diff) / 4.0;
    }
  }

  const double trace = start.scatter.trace();
  if (!(trace > 0.0)) {
    throw DegenerateSeriesError("all columns have zero dispersion");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(start.scatter);
  Eigen::VectorXd eigenvalues = eigen.eigenvalues();
  const double floor = 1e-6 * trace / static_cast<double>(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    eigenvalues(j) = std::max(eigenvalues(j), floor);
  }
  start.scatter = eigen.eigenvectors() * eigenvalues.asDiagonal() *
                  eigen.eigenvectors().transpose();
  return start;
}

// Rescale a positive-definite matrix to unit determinant.
Eigen::MatrixXd unit_determinant(const Eigen::MatrixXd& scatter) {
  Eigen::LLT<Eigen::MatrixXd> llt(scatter);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("covariance matrix is not positive definite");
  }
  double log_det = 0.0;
  const Eigen::MatrixXd lower = llt.matrixL();
  for (Eigen::Index j = 0; j < scatter.cols(); ++j) {
    log_det += 2.0 * std::log(lower(j, j));
  }
  return scatter * std::exp(-log_det / static_cast<double>(scatter.cols()));
}

// Missingness pattern shared by a group of rows.
struct Pattern {
  std::vector<Eigen::Index> observed;
  std::vector<Eigen::Index> missing;
  std::vector<Eigen::Index> rows;
  double constant = 0.0;  // consistency constant for the observed count
};

std::vector<Pattern> group_patterns(const MaskMatrix& mask, const std::vector<double>& constants) {
  std::map<std::uint64_t, Pattern> groups;
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    std::uint64_t key = 0;
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      if (mask(i, j)) {
        key |= std::uint64_t{1} << j;
      }
    }
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        (mask(i, j) ? it->second.missing : it->second.observed).push_back(j);
      }
      it->second.constant = constants[it->second.observed.size()];
    }
    it->second.rows.push_back(i);
  }
  std::vector<Pattern> out;
  out.reserve(groups.size());
  for (auto& [key, pattern] : groups) {
    out.push_back(std::move(pattern));
  }
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& matrix, const std::vector<Eigen::Index>& rows,
                          const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out(a, b) = matrix(rows[a], cols[b]);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------
// Autocovariances and Yule-Walker
// ---------------------------------------------------------------------

std::vector<double> autocovariance(const TimeSeries& series, int max_lag) {
  const int length = series.length();
  if (max_lag < 0) {
    throw std::invalid_argument("max_lag must be non-negative");
  }
  if (max_lag >= length) {
    throw std::invalid_argument("max_lag must be smaller than the series length");
  }
  double mean = 0.0;
  for (double value : series.values) {
    mean += value;
  }
  mean /= static_cast<double>(length);

  std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (int t = k; t < length; ++t) {
      acc += (series.values[t] - mean) * (series.values[t - k] - mean);
    }
    gamma[static_cast<std::size_t>(k)] = acc / static_cast<double>(length);
  }
  return gamma;
}

ArFit yule_walker_from_gamma(const std::vector<double>& gamma, int order) {
  if (order < 1) {
    throw std::invalid_argument("order must be at least 1");
  }
  if (gamma.size() < static_cast<std::size_t>(order) + 1) {
    throw std::invalid_argument("need autocovariances up to the requested order");
  }

  Eigen::MatrixXd toeplitz(order, order);
  Eigen::VectorXd rhs(order);
  for (int i = 0; i < order; ++i) {
    rhs(i) = gamma[static_cast<std::size_t>(i) + 1];
    for (int j = 0; j < order; ++j) {
      toeplitz(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(toeplitz);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("autocovariance Toeplitz matrix is singular");
  }
  const Eigen::VectorXd phi = lu.solve(rhs);

  const double sigma2 = gamma[0] - phi.dot(rhs);
  if (!(sigma2 > 0.0)) {
    throw DegenerateSeriesError("Yule-Walker innovation variance is not positive");
  }

  ArFit fit;
  fit.phi.assign(phi.data(), phi.data() + order);
  fit.sigma = std::sqrt(sigma2);
  fit.method_id = "yw";
  return fit;
}

ArFit yule_walker(const TimeSeries& series, int order) {
  return yule_walker_from_gamma(autocovariance(series, order), order);
}

// ---------------------------------------------------------------------
// Hannan-Rissanen
// ---------------------------------------------------------------------

int hannan_rissanen_default_order(int length, int p, int q) {
  if (length < 2) {
    throw std::invalid_argument("series too short");
  }
  const double log_length = std::log(static_cast<double>(length));
  const int from_length = static_cast<int>(std::ceil(log_length * log_length / 4.0));
  return std::max(from_length, 2 * std::max(p, q));
}

ArmaFit hannan_rissanen(const TimeSeries& series, int p, int q, int m) {
  if (p < 0 || q < 0) {
    throw std::invalid_argument("orders must be non-negative");
  }
  if (m <= std::max(p, q)) {
    throw std::invalid_argument("long AR order m must exceed max(p, q)");
  }
  const int length = series.length();
  if (length <= m + std::max(p, q) + 10) {
    throw InsufficientDataError("series too short for the requested Hannan-Rissanen orders");
  }

  // Step 1: long autoregression.
  const ArFit long_fit = yule_walker(series, m);

  // Step 2: residual proxies r_t for t = m+1..T (1-based).
  const std::vector<double>& y = series.values;
  std::vector<double> proxy(static_cast<std::size_t>(length), 0.0);
  for (int t = m; t < length; ++t) {
    double value = y[static_cast<std::size_t>(t)];
    for (int i = 1; i <= m; ++i) {
      value -= long_fit.phi[static_cast<std::size_t>(i - 1)] * y[static_cast<std::size_t>(t - i)];
    }
    proxy[static_cast<std::size_t>(t)] = value;
  }

  // Step 3: least squares of y_t on p lagged observations and q lagged
  // proxies over t = m+q+1..T.
  const int n_rows = length - m - q;
  const int n_cols = p + q;
  Eigen::VectorXd response(n_rows);
  Eigen::MatrixXd design(n_rows, n_cols);
  for (int r = 0; r < n_rows; ++r) {
    const int t = m + q + r;  // 0-based time index of the response
    response(r) = y[static_cast<std::size_t>(t)];
    for (int i = 1; i <= p; ++i) {
      design(r, i - 1) = y[static_cast<std::size_t>(t - i)];
    }
    for (int j = 1; j <= q; ++j) {
      design(r, p + j - 1) = proxy[static_cast<std::size_t>(t - j)];
    }
  }

  ArmaFit fit;
  Eigen::VectorXd residuals = response;
  if (n_cols > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < n_cols) {
      throw SingularMatrixError("Hannan-Rissanen design matrix is rank deficient");
    }
    const Eigen::VectorXd coef = qr.solve(response);
    residuals -= design * coef;
    fit.phi.assign(coef.data(), coef.data() + p);
    fit.theta.assign(coef.data() + p, coef.data() + p + q);
  }
  const double sigma2 = residuals.squaredNorm() / static_cast<double>(n_rows);
  if (!(sigma2 > 0.0)) {
    throw DegenerateSeriesError("Hannan-Rissanen residual variance is not positive");
  }
  fit.sigma = std::sqrt(sigma2);
  fit.residuals.assign(residuals.data(), residuals.data() + n_rows);
  return fit;
}

// ---------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------

EmbeddedMatrix embed(const TimeSeries& series, int p, const FlagVector* flags) {
  const int length = series.length();
  if (p < 0 || p >= length) {
    throw std::invalid_argument("embedding order must satisfy 0 <= p < T");
  }
  if (flags != nullptr && static_cast<int>(flags->flags.size()) != length) {
    throw std::invalid_argument("flag vector length does not match the series");
  }

  const int n_rows = length - p;
  EmbeddedMatrix out;
  out.p = p;
  out.values.resize(n_rows, p + 1);
  out.missing_mask.setConstant(n_rows, p + 1, false);
  for (int r = 0; r < n_rows; ++r) {
    const int t = p + r;  // 0-based index of the response cell y_t
    for (int c = 0; c <= p; ++c) {
      out.values(r, c) = series.values[static_cast<std::size_t>(t - c)];
      if (flags != nullptr) {
        out.missing_mask(r, c) = flags->flags[static_cast<std::size_t>(t - c)];
      }
    }
  }
  return out;
}

EmbeddedMatrix complete_cases(const EmbeddedMatrix& matrix) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (!matrix.missing_mask.row(i).any()) {
      keep.push_back(i);
    }
  }
  if (static_cast<int>(keep.size()) < matrix.p + 2) {
    throw InsufficientDataError("fewer than p+2 complete rows remain after filtering");
  }
  EmbeddedMatrix out;
  out.p = matrix.p;
  out.values.resize(keep.size(), matrix.cols());
  out.missing_mask.setConstant(keep.size(), matrix.cols(), false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = matrix.values.row(keep[i]);
  }
  return out;
}

// ---------------------------------------------------------------------
// Tukey biweight machinery
// ---------------------------------------------------------------------

double tukey_rho(double u, double c) {
  const double ratio = std::abs(u) / c;
  if (ratio >= 1.0) {
    return 1.0;
  }
  const double core = 1.0 - ratio * ratio;
  return 1.0 - core * core * core;
}

double tukey_weight(double u, double c) {
  const double ratio = std::abs(u) / c;
  if (ratio > 1.0) {
    return 0.0;
  }
  const double core = 1.0 - ratio * ratio;
  return core * core;
}

double consistency_constant(int dim, double b) {
  if (dim < 1) {
    throw std::invalid_argument("dimension must be at least 1");
  }
  if (!(b > 0.0 && b < 1.0)) {
    throw std::invalid_argument("breakdown parameter b must lie strictly between 0 and 1");
  }

  const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(dim));
  // E[rho_c(||Z||)] for ||Z|| chi-distributed: integrate the smooth part
  // over [0, c] and add the tail mass where rho saturates at 1.
  const auto expected_rho = [&](double c) {
    const auto integrand = [&](double x) {
      return tukey_rho(x, c) * 2.0 * x * boost::math::pdf(chi2, x * x);
    };
    const double body =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, c, 8, 1e-12);
    const double tail = boost::math::cdf(boost::math::complement(chi2, c * c));
    return body + tail;
  };

  // expected_rho decreases from 1 (c -> 0) to 0 (c -> infinity).
  double lo = 1e-6;
  double hi = 1.0;
  int guard = 0;
  while (expected_rho(hi) > b) {
    hi *= 2.0;
    if (++guard > 60) {
      throw ConvergenceError("consistency constant: failed to bracket the root");
    }
  }
  for (int iter = 0; iter < kFixedPointCap; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (expected_rho(mid) > b ? lo : hi) = mid;
    if (hi - lo < 1e-10) {
      return 0.5 * (lo + hi);
    }
  }
  throw ConvergenceError("consistency constant: bisection did not converge");
}

double mscale(const std::vector<double>& d, const std::vector<double>& c, double b) {
  if (d.empty() || d.size() != c.size()) {
    throw std::invalid_argument("mscale needs equally sized, non-empty inputs");
  }
  const double n = static_cast<double>(d.size());
  double positive = 0.0;
  for (double value : d) {
    if (value > 0.0) {
      positive += 1.0;
    }
  }
  if (positive / n <= b) {
    throw DegenerateSeriesError("M-scale undefined: too many zero distances");
  }

  double pivot = internal::median_of(d);
  if (!(pivot > 0.0)) {
    pivot = *std::max_element(d.begin(), d.end());
  }
  double lo = pivot * 1e-6;
  double hi = pivot * 1e6;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = std::sqrt(lo * hi);
    double mean_rho = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      mean_rho += tukey_rho(d[i] / mid, c[i]);
    }
    mean_rho /= n;
    (mean_rho > b ? lo : hi) = mid;
    if (hi / lo - 1.0 < 1e-10) {
      break;
    }
  }
  return std::sqrt(lo * hi);
}

double mscale(const std::vector<double>& d, double c, double b) {
  return mscale(d, std::vector<double>(d.size(), c), b);
}

// ---------------------------------------------------------------------
// S-estimator (complete data)
// ---------------------------------------------------------------------

LocationScatter s_estimator(const EmbeddedMatrix& matrix, double b) {
  if (matrix.has_missing()) {
    throw std::invalid_argument("s_estimator requires a fully observed matrix");
  }
  const Eigen::MatrixXd& data = matrix.values;
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (n < 2 * (dim + 1)) {
    throw InsufficientDataError("too few rows for the S-estimator");
  }

  const double c = consistency_constant(static_cast<int>(dim), b);
  const StartEstimate start = gk_start(data, matrix.missing_mask);
  Eigen::VectorXd mu = start.location;
  Eigen::MatrixXd shape = unit_determinant(start.scatter);

  double s_prev = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> distances(static_cast<std::size_t>(n));
  for (int iter = 0; iter < kFixedPointCap; ++iter) {
    Eigen::LLT<Eigen::MatrixXd> llt(shape);
    if (llt.info() != Eigen::Success) {
      throw SingularMatrixError("shape matrix became singular");
    }
    const Eigen::MatrixXd centered = data.rowwise() - mu.transpose();
    const Eigen::MatrixXd solved = llt.solve(centered.transpose());
    for (Eigen::Index i = 0; i < n; ++i) {
      distances[static_cast<std::size_t>(i)] =
          std::sqrt(std::max(0.0, centered.row(i).dot(solved.col(i))));
    }

    const double s = mscale(distances, c, b);
    Eigen::VectorXd weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      weights(i) = tukey_weight(distances[static_cast<std::size_t>(i)] / s, c);
    }
    const double weight_sum = weights.sum();
    if (!(weight_sum > 0.0)) {
      throw DegenerateSeriesError("all observations received zero weight");
    }

    const Eigen::VectorXd mu_new = (data.transpose() * weights) / weight_sum;
    const Eigen::MatrixXd recentered = data.rowwise() - mu_new.transpose();
    const Eigen::MatrixXd weighted_cov =
        (recentered.transpose() * weights.asDiagonal() * recentered) / static_cast<double>(n);
    const Eigen::MatrixXd shape_new = unit_determinant(weighted_cov);

    const bool done = iter > 0 && std::abs(s / s_prev - 1.0) < kFixedPointTol &&
                      (mu_new - mu).cwiseAbs().maxCoeff() < kFixedPointTol;
    mu = mu_new;
    shape = shape_new;
    s_prev = s;
    iterations = iter + 1;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("S-estimator did not converge within the iteration cap");
  }

  LocationScatter out;
  out.location = mu;
  out.scatter = s_prev * s_prev * shape;
  out.scale = s_prev;
  out.iterations = iterations;
  return out;
}

// ---------------------------------------------------------------------
// Generalized S-estimator (missing cells)
// ---------------------------------------------------------------------

LocationScatter gse(const EmbeddedMatrix& matrix, double b) {
  const Eigen::MatrixXd& data = matrix.values;
  const MaskMatrix& mask = matrix.missing_mask;
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();

  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::Index observed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!mask(i, j)) {
        ++observed;
      }
    }
    if (observed < matrix.p + 2) {
      throw InsufficientDataError("column " + std::to_string(j) +
                                  " has fewer than p+2 observed cells");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mask.row(i).all()) {
      throw InsufficientDataError("row " + std::to_string(i) + " has no observed cells");
    }
  }

  // Consistency constants per observed-coordinate count, 1..dim.
  std::vector<double> constants(static_cast<std::size_t>(dim) + 1, 0.0);
  for (int k = 1; k <= dim; ++k) {
    constants[static_cast<std::size_t>(k)] = consistency_constant(k, b);
  }
  const std::vector<Pattern> patterns = group_patterns(mask, constants);

  const StartEstimate start = gk_start(data, mask);
  Eigen::VectorXd mu = start.location;
  Eigen::MatrixXd shape = unit_determinant(start.scatter);

  double s_prev = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> distances(static_cast<std::size_t>(n));
  std::vector<double> row_constants(static_cast<std::size_t>(n));
  Eigen::MatrixXd completed(n, dim);

  for (int iter = 0; iter < kFixedPointCap; ++iter) {
    // Per-pattern blocks of the current shape matrix.
    struct PatternBlocks {
      Eigen::LLT<Eigen::MatrixXd> observed_llt;
      Eigen::MatrixXd regression;  // S_mo * S_oo^-1
      Eigen::MatrixXd fill;        // S_mm - S_mo S_oo^-1 S_om (shape units)
    };
    std::vector<PatternBlocks> blocks(patterns.size());
    for (std::size_t g = 0; g < patterns.size(); ++g) {
      const Pattern& pattern = patterns[g];
      const Eigen::MatrixXd observed_block = submatrix(shape, pattern.observed, pattern.observed);
      blocks[g].observed_llt.compute(observed_block);
      if (blocks[g].observed_llt.info() != Eigen::Success) {
        throw SingularMatrixError("observed block of the shape matrix is singular");
      }
      if (!pattern.missing.empty()) {
        const Eigen::MatrixXd cross = submatrix(shape, pattern.missing, pattern.observed);
        blocks[g].regression =
            blocks[g].observed_llt.solve(cross.transpose()).transpose();
        blocks[g].fill = submatrix(shape, pattern.missing, pattern.missing) -
                         blocks[g].regression * cross.transpose();
      }
    }

    // Partial distances and conditional completion.
    for (std::size_t g = 0; g < patterns.size(); ++g) {
      const Pattern& pattern = patterns[g];
      const std::size_t k = pattern.observed.size();
      Eigen::VectorXd residual(k);
      for (Eigen::Index i : pattern.rows) {
        for (std::size_t a = 0; a < k; ++a) {
          residual(static_cast<Eigen::Index>(a)) =
              data(i, pattern.observed[a]) - mu(pattern.observed[a]);
        }
        const Eigen::VectorXd solved = blocks[g].observed_llt.solve(residual);
        distances[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, residual.dot(solved)));
        row_constants[static_cast<std::size_t>(i)] = pattern.constant;

        for (std::size_t a = 0; a < k; ++a) {
          completed(i, pattern.observed[a]) = data(i, pattern.observed[a]);
        }
        if (!pattern.missing.empty()) {
          const Eigen::VectorXd filled = blocks[g].regression * residual;
          for (std::size_t a = 0; a < pattern.missing.size(); ++a) {
            completed(i, pattern.missing[a]) =
                mu(pattern.missing[a]) + filled(static_cast<Eigen::Index>(a));
          }
        }
      }
    }

    const double s = mscale(distances, row_constants, b);
    Eigen::VectorXd weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      weights(i) = tukey_weight(distances[static_cast<std::size_t>(i)] / s,
                                row_constants[static_cast<std::size_t>(i)]);
    }
    const double weight_sum = weights.sum();
    if (!(weight_sum > 0.0)) {
      throw DegenerateSeriesError("all observations received zero weight");
    }

    const Eigen::VectorXd mu_new = (completed.transpose() * weights) / weight_sum;
    const Eigen::MatrixXd recentered = completed.rowwise() - mu_new.transpose();
    Eigen::MatrixXd weighted_cov =
        recentered.transpose() * weights.asDiagonal() * recentered;
    // Conditional covariance of the filled blocks, in data units: the
    // fill blocks come from the det-1 shape, so scale by s^2.
    for (std::size_t g = 0; g < patterns.size(); ++g) {
      const Pattern& pattern = patterns[g];
      if (pattern.missing.empty()) {
        continue;
      }
      double pattern_weight = 0.0;
      for (Eigen::Index i : pattern.rows) {
        pattern_weight += weights(i);
      }
      const Eigen::MatrixXd scaled_fill = s * s * pattern_weight * blocks[g].fill;
      for (std::size_t a = 0; a < pattern.missing.size(); ++a) {
        for (std::size_t bb = 0; bb < pattern.missing.size(); ++bb) {
          weighted_cov(pattern.missing[a], pattern.missing[bb]) +=
              scaled_fill(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(bb));
        }
      }
    }
    weighted_cov /= static_cast<double>(n);
    const Eigen::MatrixXd shape_new = unit_determinant(weighted_cov);

    const bool done = iter > 0 && std::abs(s / s_prev - 1.0) < kFixedPointTol &&
                      (mu_new - mu).cwiseAbs().maxCoeff() < kFixedPointTol;
    mu = mu_new;
    shape = shape_new;
    s_prev = s;
    iterations = iter + 1;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("GSE did not converge within the iteration cap");
  }

  LocationScatter out;
  out.location = mu;
  out.scatter = s_prev * s_prev * shape;
  out.scale = s_prev;
  out.iterations = iterations;
  return out;
}

// ---------------------------------------------------------------------
// AR extraction and pipelines
// ---------------------------------------------------------------------

ArFit scatter_to_ar(const LocationScatter& est, int p) {
  if (est.scatter.rows() != p + 1 || est.scatter.cols() != p + 1) {
    throw std::invalid_argument("scatter dimension does not match p+1");
  }
  const double response_var = est.scatter(0, 0);
  ArFit fit;
  fit.method_id = "scatter";
  fit.diagnostics.iterations = est.iterations;

  double sigma2 = response_var;
  if (p > 0) {
    const Eigen::VectorXd cross = est.scatter.block(1, 0, p, 1);
    const Eigen::MatrixXd lag_cov = est.scatter.block(1, 1, p, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lag_cov);
    if (!lu.isInvertible()) {
      throw SingularMatrixError("lagged-coordinate scatter block is singular");
    }
    const Eigen::VectorXd phi = lu.solve(cross);
    sigma2 = response_var - cross.dot(phi);
    fit.phi.assign(phi.data(), phi.data() + p);
  }
  if (!(sigma2 > 0.0)) {
    throw DegenerateSeriesError("implied innovation variance is not positive");
  }
  fit.sigma = std::sqrt(sigma2);
  return fit;
}

namespace {

FlagVector run_filter(const TimeSeries& series, FilterId filter_id, double alpha) {
  return filter_id == FilterId::UHS ? hs_filter(series, alpha) : gy_filter(series, alpha);
}

// Drop rows whose cells are all masked; GSE needs one observed cell per row.
EmbeddedMatrix drop_empty_rows(const EmbeddedMatrix& matrix) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (!matrix.missing_mask.row(i).all()) {
      keep.push_back(i);
    }
  }
  if (static_cast<Eigen::Index>(keep.size()) == matrix.rows()) {
    return matrix;
  }
  EmbeddedMatrix out;
  out.p = matrix.p;
  out.values.resize(keep.size(), matrix.cols());
  out.missing_mask.resize(keep.size(), matrix.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = matrix.values.row(keep[i]);
    out.missing_mask.row(static_cast<Eigen::Index>(i)) = matrix.missing_mask.row(keep[i]);
  }
  return out;
}

}  // namespace

ArFit artsgs(const TimeSeries& series, int p, FilterId filter_id, double alpha,
             const std::vector<bool>* truth) {
  const FlagVector flags = run_filter(series, filter_id, alpha);
  const EmbeddedMatrix embedded = drop_empty_rows(embed(series, p, &flags));
  const LocationScatter estimate = gse(embedded, kBreakdown);
  ArFit fit = scatter_to_ar(estimate, p);
  fit.method_id = "artsgs";
  fit.diagnostics.flagged_cells = flags.flagged_count();
  fit.diagnostics.rows_used = static_cast<int>(embedded.rows());
  if (truth != nullptr) {
    fit.diagnostics.confusion = flag_metrics(flags, *truth);
  }
  return fit;
}

ArFit ars(const TimeSeries& series, int p, FilterId filter_id, double alpha,
          const std::vector<bool>* truth) {
  const FlagVector flags = run_filter(series, filter_id, alpha);
  const EmbeddedMatrix embedded = complete_cases(embed(series, p, &flags));
  const LocationScatter estimate = s_estimator(embedded, kBreakdown);
  ArFit fit = scatter_to_ar(estimate, p);
  fit.method_id = "ars";
  fit.diagnostics.flagged_cells = flags.flagged_count();
  fit.diagnostics.rows_used = static_cast<int>(embedded.rows());
  if (truth != nullptr) {
    fit.diagnostics.confusion = flag_metrics(flags, *truth);
  }
  return fit;
}

ArFit nofilter_s(const TimeSeries& series, int p) {
  const EmbeddedMatrix embedded = embed(series, p, nullptr);
  const LocationScatter estimate = s_estimator(embedded, kBreakdown);
  ArFit fit = scatter_to_ar(estimate, p);
  fit.method_id = "nofilter-s";
  fit.diagnostics.rows_used = static_cast<int>(embedded.rows());
  return fit;
}

}  // namespace cellarma

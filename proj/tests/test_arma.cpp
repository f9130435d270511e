// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cellarma/arma.hpp"

using cellarma::ArmaModel;
using cellarma::TimeSeries;

namespace {

double sample_mean(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
  const double mean = sample_mean(values);
  double acc = 0.0;
  for (double value : values) {
    acc += (value - mean) * (value - mean);
  }
  return std::sqrt(acc / static_cast<double>(values.size()));
}

double lag1_autocorrelation(const std::vector<double>& values) {
  const double mean = sample_mean(values);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    den += (values[t] - mean) * (values[t] - mean);
    if (t > 0) {
      num += (values[t] - mean) * (values[t - 1] - mean);
    }
  }
  return num / den;
}

}  // namespace

TEST_CASE("model construction validates stability, invertibility and sigma") {
  CHECK_NOTHROW(ArmaModel({0.5, 0.2, 0.2}, {}, 1.0));
  CHECK_NOTHROW(ArmaModel({0.5}, {0.4}, 2.0));
  CHECK_NOTHROW(ArmaModel({}, {}, 1.0));  // white noise

  CHECK_THROWS_AS(ArmaModel({1.01}, {}, 1.0), std::invalid_argument);   // explosive AR
  CHECK_THROWS_AS(ArmaModel({0.5}, {1.5}, 1.0), std::invalid_argument); // MA root inside
  CHECK_THROWS_AS(ArmaModel({0.5}, {}, 0.0), std::invalid_argument);    // sigma
  CHECK_THROWS_AS(ArmaModel({0.5}, {}, -1.0), std::invalid_argument);
}

TEST_CASE("simulation is seeded and deterministic") {
  const ArmaModel model({0.5}, {}, 1.0);
  const TimeSeries a = cellarma::simulate(model, 200, 42);
  const TimeSeries b = cellarma::simulate(model, 200, 42);
  const TimeSeries c = cellarma::simulate(model, 200, 43);
  REQUIRE(a.length() == 200);
  CHECK(a.origin == cellarma::SeriesOrigin::clean);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("AR(1) sample moments match theory") {
  const ArmaModel model({0.5}, {}, 1.0);
  const TimeSeries series = cellarma::simulate(model, 20000, 7);
  // Stationary variance 1/(1-0.25), lag-1 autocorrelation phi.
  CHECK(sample_sd(series.values) == doctest::Approx(std::sqrt(1.0 / 0.75)).epsilon(0.05));
  CHECK(lag1_autocorrelation(series.values) == doctest::Approx(0.5).epsilon(0.06));
  CHECK(std::abs(sample_mean(series.values)) < 0.1);
}

TEST_CASE("AR(3) stationary standard deviation matches the exact value") {
  // Autocovariance equations for phi = (0.5, 0.2, 0.2), sigma = 1 give
  // gamma(0) = 220/63, i.e. sd = 1.86868...
  const ArmaModel model({0.5, 0.2, 0.2}, {}, 1.0);
  const TimeSeries series = cellarma::simulate(model, 20000, 11);
  CHECK(sample_sd(series.values) == doctest::Approx(std::sqrt(220.0 / 63.0)).epsilon(0.08));
}

TEST_CASE("innovations and reconstruct are inverse operations") {
  const ArmaModel model({0.5, 0.2}, {0.4}, 1.3);
  const TimeSeries series = cellarma::simulate(model, 500, 5);
  const TimeSeries residuals = cellarma::innovations(model, series);
  REQUIRE(residuals.length() == series.length());
  CHECK(residuals.origin == cellarma::SeriesOrigin::residual);

  const TimeSeries rebuilt = cellarma::reconstruct(model, residuals);
  REQUIRE(rebuilt.length() == series.length());
  for (int t = 0; t < series.length(); ++t) {
    CHECK(rebuilt.values[static_cast<std::size_t>(t)] ==
          doctest::Approx(series.values[static_cast<std::size_t>(t)]).epsilon(1e-12));
  }
}

TEST_CASE("innovations of a simulated series recover white noise") {
  const ArmaModel model({0.5, 0.2, 0.2}, {}, 1.0);
  const TimeSeries series = cellarma::simulate(model, 10000, 9);
  const TimeSeries residuals = cellarma::innovations(model, series);
  // Skip the start-up transient, then the residuals should look N(0, 1).
  std::vector<double> tail(residuals.values.begin() + 50, residuals.values.end());
  CHECK(sample_sd(tail) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(sample_mean(tail)) < 0.05);
  CHECK(std::abs(lag1_autocorrelation(tail)) < 0.05);
}

TEST_CASE("white-noise model passes values through innovations unchanged") {
  const ArmaModel model({}, {}, 1.0);
  const TimeSeries series = cellarma::simulate(model, 100, 3);
  const TimeSeries residuals = cellarma::innovations(model, series);
  CHECK(residuals.values == series.values);
}

TEST_CASE("simulate rejects nonpositive length") {
  const ArmaModel model({0.5}, {}, 1.0);
  CHECK_THROWS_AS(cellarma::simulate(model, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cellarma::simulate(model, -5, 1), std::invalid_argument);
}

// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cellarma {

/// Input has no usable spread (constant series, zero MAD, all-tied distances).
class DegenerateSeriesError : public std::runtime_error {
 public:
  explicit DegenerateSeriesError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear system or covariance matrix lost rank.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver hit its iteration cap without meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Too few rows or cells left to estimate anything.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cellarma

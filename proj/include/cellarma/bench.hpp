// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cellarma/contamination.hpp"
#include "cellarma/estimators.hpp"

namespace cellarma {

/// One estimation method to run per seed. kind is one of yw, hr, artsgs,
/// ars, nofilter-s; filter/alpha apply to the filter-based kinds. label
/// names the method in reports (e.g. UHS88, UHS88CC).
struct MethodSpec {
  std::string kind;
  std::optional<FilterId> filter;
  double alpha = 0.0;
  std::string label;
};

/// Periodic replacement contamination: every period-th cell from start is
/// replaced by value.
struct PeriodicContamination {
  int period = 7;
  double value = 4.0;
  int start = 1;
};

/// Full experiment description: data-generating model, length, one
/// contamination mechanism (or none), the methods to run, and the seeds.
struct ExperimentConfig {
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma = 1.0;
  int length = 1000;
  int fit_p = 0;  // AR order for fits; 0 means "use phi.size()"
  int fit_q = 0;  // MA order for hr fits
  std::optional<PeriodicContamination> periodic;
  std::optional<BernoulliContamSpec> bernoulli;
  std::vector<OutlierSpec> ledger;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;

  int effective_p() const { return fit_p > 0 ? fit_p : static_cast<int>(phi.size()); }
};

/// Parse/serialize the canonical JSON config schema (see README). Throws
/// std::runtime_error on invalid documents.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Outcome of one (method, seed) run. Failures carry the error text
/// instead of aborting the study. wall_ms is measured but deliberately
/// excluded from serialized reports so identical configs produce identical
/// report bytes.
struct RunRecord {
  std::string method_label;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma = 0.0;
  FitDiagnostics diagnostics;
  double wall_ms = 0.0;
};

/// Per-method aggregates over the successful runs.
struct MethodAggregate {
  std::string method_label;
  int runs_ok = 0;
  int runs_failed = 0;
  std::vector<double> mean_phi;
  std::vector<double> median_phi;
  double mean_sigma = 0.0;
  double median_sigma = 0.0;
  std::optional<std::vector<double>> mean_confusion;  // NF/F x clean/outlier
};

struct BenchReport {
  std::string config_digest;
  std::vector<RunRecord> runs;
  std::vector<MethodAggregate> aggregates;

  bool has_failures() const;
};

/// Run every configured method on every seed: simulate, contaminate, fit,
/// and collect fits plus filter confusion counts. Deterministic given the
/// config; per-run errors are recorded, not fatal.
BenchReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { text, csv, json };

/// Render the report: text mirrors the parameter-table and filter-table
/// layouts, csv/json are machine-readable equivalents.
std::string render_tables(const BenchReport& report, ReportFormat format);

/// FNV-1a 64-bit digest of the canonical config serialization, as hex.
std::string config_digest(const ExperimentConfig& config);

}  // namespace cellarma

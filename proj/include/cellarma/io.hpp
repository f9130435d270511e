// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cellarma/arma.hpp"
#include "cellarma/contamination.hpp"
#include "cellarma/estimators.hpp"
#include "cellarma/filters.hpp"

namespace cellarma {

/// Single-column CSV with header `value`. Origin metadata is not stored;
/// parsing yields a series tagged clean.
std::string series_to_csv(const TimeSeries& series);
TimeSeries series_from_csv(const std::string& text);

/// Three-column CSV `observed,clean,truth_flag`; the ledger is not part of
/// the CSV and round-trips through JSON instead.
std::string contaminated_to_csv(const ContaminatedSeries& series);
ContaminatedSeries contaminated_from_csv(const std::string& text);

/// Single-column CSV of 0/1 with header `flag`.
std::string flags_to_csv(const FlagVector& flags);
std::vector<bool> flags_from_csv(const std::string& text);

/// CSV with one row per embedding row; masked cells serialize as empty
/// fields.
std::string embedded_to_csv(const EmbeddedMatrix& matrix);

/// Outlier ledger as a JSON array of {kind, time, magnitude} records.
nlohmann::json ledger_to_json(const std::vector<OutlierSpec>& ledger);
std::vector<OutlierSpec> ledger_from_json(const nlohmann::json& doc);

/// Fits as JSON {method, phi, sigma, diagnostics}.
nlohmann::json fit_to_json(const ArFit& fit);
nlohmann::json fit_to_json(const ArmaFit& fit);
nlohmann::json diagnostics_to_json(const FitDiagnostics& diagnostics);

/// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cellarma

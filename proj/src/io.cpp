// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cellarma {

namespace {

// Shortest representation that round-trips a double through text.
std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      lines.push_back(line);
    }
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const std::string::size_type comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, std::size_t line_number) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(field, &consumed);
    if (consumed != field.size()) {
      throw std::invalid_argument(field);
    }
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_number) + ": cannot parse number '" +
                             field + "'");
  }
}

void expect_header(const std::vector<std::string>& lines, const std::string& header) {
  if (lines.empty()) {
    throw std::runtime_error("empty document; expected header '" + header + "'");
  }
  if (lines.front() != header) {
    throw std::runtime_error("unexpected header '" + lines.front() + "'; expected '" + header +
                             "'");
  }
}

}  // namespace

std::string series_to_csv(const TimeSeries& series) {
  std::string out = "value\n";
  for (double value : series.values) {
    out += format_double(value);
    out += '\n';
  }
  return out;
}

TimeSeries series_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  expect_header(lines, "value");
  TimeSeries series;
  series.values.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    series.values.push_back(parse_double(lines[i], i + 1));
  }
  return series;
}

std::string contaminated_to_csv(const ContaminatedSeries& series) {
  std::string out = "observed,clean,truth_flag\n";
  for (int t = 0; t < series.observed.length(); ++t) {
    out += format_double(series.observed.values[static_cast<std::size_t>(t)]);
    out += ',';
    out += format_double(series.clean.values[static_cast<std::size_t>(t)]);
    out += ',';
    out += series.cell_truth[static_cast<std::size_t>(t)] ? '1' : '0';
    out += '\n';
  }
  return out;
}

ContaminatedSeries contaminated_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  expect_header(lines, "observed,clean,truth_flag");
  ContaminatedSeries series;
  series.observed.origin = SeriesOrigin::contaminated;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != 3) {
      throw std::runtime_error("line " + std::to_string(i + 1) + ": expected 3 fields, found " +
                               std::to_string(fields.size()));
    }
    series.observed.values.push_back(parse_double(fields[0], i + 1));
    series.clean.values.push_back(parse_double(fields[1], i + 1));
    if (fields[2] != "0" && fields[2] != "1") {
      throw std::runtime_error("line " + std::to_string(i + 1) + ": truth flag must be 0 or 1");
    }
    series.cell_truth.push_back(fields[2] == "1");
  }
  return series;
}

std::string flags_to_csv(const FlagVector& flags) {
  std::string out = "flag\n";
  for (bool flag : flags.flags) {
    out += flag ? "1\n" : "0\n";
  }
  return out;
}

std::vector<bool> flags_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  expect_header(lines, "flag");
  std::vector<bool> flags;
  flags.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i] != "0" && lines[i] != "1") {
      throw std::runtime_error("line " + std::to_string(i + 1) + ": flag must be 0 or 1");
    }
    flags.push_back(lines[i] == "1");
  }
  return flags;
}

std::string embedded_to_csv(const EmbeddedMatrix& matrix) {
  std::string out;
  for (int c = 0; c <= matrix.p; ++c) {
    if (c > 0) {
      out += ',';
    }
    out += "lag" + std::to_string(c);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) {
        out += ',';
      }
      if (!matrix.missing_mask(i, c)) {
        out += format_double(matrix.values(i, c));
      }
    }
    out += '\n';
  }
  return out;
}

nlohmann::json ledger_to_json(const std::vector<OutlierSpec>& ledger) {
  nlohmann::json doc = nlohmann::json::array();
  for (const OutlierSpec& spec : ledger) {
    doc.push_back({{"kind", spec.kind == OutlierKind::additive ? "additive" : "innovative"},
                   {"time", spec.time},
                   {"magnitude", spec.magnitude}});
  }
  return doc;
}

std::vector<OutlierSpec> ledger_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) {
    throw std::runtime_error("ledger document must be a JSON array");
  }
  std::vector<OutlierSpec> ledger;
  ledger.reserve(doc.size());
  for (const nlohmann::json& entry : doc) {
    OutlierSpec spec;
    const std::string kind = entry.at("kind").get<std::string>();
    if (kind == "additive") {
      spec.kind = OutlierKind::additive;
    } else if (kind == "innovative") {
      spec.kind = OutlierKind::innovative;
    } else {
      throw std::runtime_error("unknown outlier kind '" + kind + "'");
    }
    spec.time = entry.at("time").get<int>();
    spec.magnitude = entry.at("magnitude").get<double>();
    ledger.push_back(spec);
  }
  return ledger;
}

nlohmann::json diagnostics_to_json(const FitDiagnostics& diagnostics) {
  nlohmann::json doc = {{"iterations", diagnostics.iterations},
                        {"flagged_cells", diagnostics.flagged_cells},
                        {"rows_used", diagnostics.rows_used}};
  if (diagnostics.confusion.has_value()) {
    const ConfusionCounts& counts = *diagnostics.confusion;
    doc["confusion"] = {{"clean_not_flagged", counts.clean_not_flagged},
                        {"clean_flagged", counts.clean_flagged},
                        {"outlier_not_flagged", counts.outlier_not_flagged},
                        {"outlier_flagged", counts.outlier_flagged}};
  }
  return doc;
}

nlohmann::json fit_to_json(const ArFit& fit) {
  return {{"method", fit.method_id},
          {"phi", fit.phi},
          {"sigma", fit.sigma},
          {"diagnostics", diagnostics_to_json(fit.diagnostics)}};
}

nlohmann::json fit_to_json(const ArmaFit& fit) {
  return {{"method", "hr"},
          {"phi", fit.phi},
          {"theta", fit.theta},
          {"sigma", fit.sigma},
          {"diagnostics", {{"rows_used", static_cast<int>(fit.residuals.size())}}}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  stream << content;
  if (!stream) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

}  // namespace cellarma

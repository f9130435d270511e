// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#include "cellarma/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "cellarma/io.hpp"
#include "internal_stats.hpp"

namespace cellarma {

namespace {

const char* kKinds[] = {"yw", "hr", "artsgs", "ars", "nofilter-s"};

bool known_kind(const std::string& kind) {
  return std::find(std::begin(kKinds), std::end(kKinds), kind) != std::end(kKinds);
}

bool needs_filter(const std::string& kind) { return kind == "artsgs" || kind == "ars"; }

std::string default_label(const MethodSpec& method) {
  if (!method.filter.has_value()) {
    std::string label = method.kind;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return label;
  }
  const std::string base = method.filter == FilterId::UHS ? "UHS" : "UGY";
  const int percent = static_cast<int>(std::lround(method.alpha * 100.0));
  std::string label = base + std::to_string(percent);
  if (method.kind == "ars") {
    label += "CC";  // complete-cases variant
  }
  return label;
}

FilterId filter_from_string(const std::string& name) {
  if (name == "ugy" || name == "UGY") {
    return FilterId::UGY;
  }
  if (name == "uhs" || name == "UHS") {
    return FilterId::UHS;
  }
  throw std::runtime_error("unknown filter '" + name + "' (expected ugy or uhs)");
}

std::string format_fixed(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

std::string format_full(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') {
      out += '"';
    }
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

bool BenchReport::has_failures() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& run) { return !run.ok; });
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  const nlohmann::json& model = doc.at("model");
  config.phi = model.value("phi", std::vector<double>{});
  config.theta = model.value("theta", std::vector<double>{});
  config.sigma = model.value("sigma", 1.0);
  config.length = doc.value("length", 1000);

  if (doc.contains("fit")) {
    config.fit_p = doc["fit"].value("p", 0);
    config.fit_q = doc["fit"].value("q", 0);
  }

  if (doc.contains("contamination")) {
    const nlohmann::json& contamination = doc["contamination"];
    int mechanisms = 0;
    if (contamination.contains("periodic")) {
      const nlohmann::json& periodic = contamination["periodic"];
      config.periodic = PeriodicContamination{periodic.value("period", 7),
                                              periodic.value("value", 4.0),
                                              periodic.value("start", 1)};
      ++mechanisms;
    }
    if (contamination.contains("bernoulli")) {
      const nlohmann::json& bernoulli = contamination["bernoulli"];
      BernoulliContamSpec spec;
      spec.p_additive = bernoulli.value("p_additive", 0.0);
      spec.p_innovative = bernoulli.value("p_innovative", 0.0);
      spec.magnitude_sd = bernoulli.value("magnitude_sd", 1.0);
      config.bernoulli = spec;
      ++mechanisms;
    }
    if (contamination.contains("ledger")) {
      config.ledger = ledger_from_json(contamination["ledger"]);
      ++mechanisms;
    }
    if (mechanisms > 1) {
      throw std::runtime_error("config must select at most one contamination mechanism");
    }
  }

  for (const nlohmann::json& entry : doc.value("methods", nlohmann::json::array())) {
    MethodSpec method;
    method.kind = entry.at("kind").get<std::string>();
    if (!known_kind(method.kind)) {
      throw std::runtime_error("unknown method kind '" + method.kind + "'");
    }
    if (entry.contains("filter")) {
      method.filter = filter_from_string(entry["filter"].get<std::string>());
      method.alpha = entry.value("alpha", 0.0);
      if (!(method.alpha > 0.0 && method.alpha < 1.0)) {
        throw std::runtime_error("method '" + method.kind +
                                 "': alpha must lie strictly between 0 and 1");
      }
    }
    if (needs_filter(method.kind) && !method.filter.has_value()) {
      throw std::runtime_error("method '" + method.kind + "' requires a filter and alpha");
    }
    method.label = entry.value("label", std::string{});
    if (method.label.empty()) {
      method.label = default_label(method);
    }
    config.methods.push_back(std::move(method));
  }

  config.seeds = doc.value("seeds", std::vector<std::uint64_t>{});

  if (config.methods.empty() || config.seeds.empty()) {
    throw std::runtime_error("config needs at least one method and one seed");
  }
  std::set<std::string> labels;
  for (const MethodSpec& method : config.methods) {
    if (!labels.insert(method.label).second) {
      throw std::runtime_error("duplicate method label '" + method.label + "'");
    }
  }
  // Validate the model eagerly so config errors surface before any run.
  ArmaModel model_check(config.phi, config.theta, config.sigma);
  (void)model_check;
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["model"] = {{"phi", config.phi}, {"theta", config.theta}, {"sigma", config.sigma}};
  doc["length"] = config.length;
  doc["fit"] = {{"p", config.fit_p}, {"q", config.fit_q}};
  if (config.periodic.has_value()) {
    doc["contamination"]["periodic"] = {{"period", config.periodic->period},
                                        {"value", config.periodic->value},
                                        {"start", config.periodic->start}};
  }
  if (config.bernoulli.has_value()) {
    doc["contamination"]["bernoulli"] = {{"p_additive", config.bernoulli->p_additive},
                                         {"p_innovative", config.bernoulli->p_innovative},
                                         {"magnitude_sd", config.bernoulli->magnitude_sd}};
  }
  if (!config.ledger.empty()) {
    doc["contamination"]["ledger"] = ledger_to_json(config.ledger);
  }
  doc["methods"] = nlohmann::json::array();
  for (const MethodSpec& method : config.methods) {
    nlohmann::json entry = {{"kind", method.kind}, {"label", method.label}};
    if (method.filter.has_value()) {
      entry["filter"] = method.filter == FilterId::UHS ? "uhs" : "ugy";
      entry["alpha"] = method.alpha;
    }
    doc["methods"].push_back(std::move(entry));
  }
  doc["seeds"] = config.seeds;
  return doc;
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string bytes = config_to_json(config).dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

namespace {

struct SeedData {
  TimeSeries observed;
  std::vector<bool> truth;
};

SeedData build_seed_data(const ExperimentConfig& config, const ArmaModel& model,
                         std::uint64_t seed) {
  if (config.bernoulli.has_value()) {
    ContaminatedSeries cs = bernoulli_contaminate(model, config.length, *config.bernoulli, seed);
    return SeedData{std::move(cs.observed), std::move(cs.cell_truth)};
  }
  TimeSeries clean = simulate(model, config.length, seed);
  if (config.periodic.has_value()) {
    ContaminatedSeries cs = periodic_contaminate(clean, config.periodic->period,
                                                 config.periodic->value, config.periodic->start);
    return SeedData{std::move(cs.observed), std::move(cs.cell_truth)};
  }
  if (!config.ledger.empty()) {
    ContaminatedSeries cs = inject(model, clean, config.ledger);
    return SeedData{std::move(cs.observed), std::move(cs.cell_truth)};
  }
  const int length = clean.length();
  return SeedData{std::move(clean), std::vector<bool>(static_cast<std::size_t>(length), false)};
}

RunRecord run_method(const ExperimentConfig& config, const MethodSpec& method,
                     const SeedData& data, std::uint64_t seed) {
  RunRecord record;
  record.method_label = method.label;
  record.seed = seed;
  const int p = config.effective_p();
  const auto started = std::chrono::steady_clock::now();
  try {
    if (method.kind == "yw") {
      const ArFit fit = yule_walker(data.observed, p);
      record.phi = fit.phi;
      record.sigma = fit.sigma;
      record.diagnostics = fit.diagnostics;
    } else if (method.kind == "hr") {
      const int q = config.fit_q > 0 ? config.fit_q : static_cast<int>(config.theta.size());
      const int m = hannan_rissanen_default_order(config.length, p, q);
      const ArmaFit fit = hannan_rissanen(data.observed, p, q, m);
      record.phi = fit.phi;
      record.theta = fit.theta;
      record.sigma = fit.sigma;
      record.diagnostics.rows_used = static_cast<int>(fit.residuals.size());
    } else if (method.kind == "artsgs") {
      const ArFit fit = artsgs(data.observed, p, *method.filter, method.alpha, &data.truth);
      record.phi = fit.phi;
      record.sigma = fit.sigma;
      record.diagnostics = fit.diagnostics;
    } else if (method.kind == "ars") {
      const ArFit fit = ars(data.observed, p, *method.filter, method.alpha, &data.truth);
      record.phi = fit.phi;
      record.sigma = fit.sigma;
      record.diagnostics = fit.diagnostics;
    } else {  // nofilter-s
      const ArFit fit = nofilter_s(data.observed, p);
      record.phi = fit.phi;
      record.sigma = fit.sigma;
      record.diagnostics = fit.diagnostics;
    }
    record.ok = true;
  } catch (const std::exception& error) {
    record.ok = false;
    record.error = error.what();
  }
  record.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             started)
                       .count();
  return record;
}

MethodAggregate aggregate_method(const std::string& label, const std::vector<RunRecord>& runs,
                                 int p) {
  MethodAggregate aggregate;
  aggregate.method_label = label;
  std::vector<const RunRecord*> ok_runs;
  for (const RunRecord& run : runs) {
    if (run.method_label != label) {
      continue;
    }
    (run.ok ? aggregate.runs_ok : aggregate.runs_failed)++;
    if (run.ok) {
      ok_runs.push_back(&run);
    }
  }
  if (ok_runs.empty()) {
    return aggregate;
  }

  aggregate.mean_phi.assign(static_cast<std::size_t>(p), 0.0);
  aggregate.median_phi.assign(static_cast<std::size_t>(p), 0.0);
  std::vector<double> column(ok_runs.size());
  for (int j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ok_runs.size(); ++i) {
      column[i] = ok_runs[i]->phi[static_cast<std::size_t>(j)];
      sum += column[i];
    }
    aggregate.mean_phi[static_cast<std::size_t>(j)] = sum / static_cast<double>(ok_runs.size());
    aggregate.median_phi[static_cast<std::size_t>(j)] = internal::median_of(column);
  }
  double sigma_sum = 0.0;
  for (std::size_t i = 0; i < ok_runs.size(); ++i) {
    column[i] = ok_runs[i]->sigma;
    sigma_sum += column[i];
  }
  aggregate.mean_sigma = sigma_sum / static_cast<double>(ok_runs.size());
  aggregate.median_sigma = internal::median_of(column);

  std::vector<double> confusion(4, 0.0);
  int with_confusion = 0;
  for (const RunRecord* run : ok_runs) {
    if (!run->diagnostics.confusion.has_value()) {
      continue;
    }
    const ConfusionCounts& counts = *run->diagnostics.confusion;
    confusion[0] += counts.clean_not_flagged;
    confusion[1] += counts.clean_flagged;
    confusion[2] += counts.outlier_not_flagged;
    confusion[3] += counts.outlier_flagged;
    ++with_confusion;
  }
  if (with_confusion > 0) {
    for (double& value : confusion) {
      value /= with_confusion;
    }
    aggregate.mean_confusion = confusion;
  }
  return aggregate;
}

}  // namespace

BenchReport run_experiment(const ExperimentConfig& config) {
  if (config.methods.empty() || config.seeds.empty()) {
    throw std::runtime_error("config needs at least one method and one seed");
  }
  const ArmaModel model(config.phi, config.theta, config.sigma);

  BenchReport report;
  report.config_digest = config_digest(config);

  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());

  for (std::uint64_t seed : seeds) {
    const SeedData data = build_seed_data(config, model, seed);
    for (const MethodSpec& method : config.methods) {
      report.runs.push_back(run_method(config, method, data, seed));
    }
  }

  const int p = config.effective_p();
  for (const MethodSpec& method : config.methods) {
    report.aggregates.push_back(aggregate_method(method.label, report.runs, p));
  }
  return report;
}

namespace {

std::string render_text(const BenchReport& report) {
  std::string out = "config " + report.config_digest + "\n\n";

  std::size_t label_width = 8;
  for (const MethodAggregate& aggregate : report.aggregates) {
    label_width = std::max(label_width, aggregate.method_label.size());
  }
  int p = 0;
  for (const MethodAggregate& aggregate : report.aggregates) {
    p = std::max(p, static_cast<int>(aggregate.mean_phi.size()));
  }
  if (p == 0) {
    p = 3;  // canonical experiment shape when the report carries no fits
  }

  out += "Parameter estimates (mean over seeds)\n";
  out += std::string(label_width, ' ');
  for (int j = 1; j <= p; ++j) {
    out += "   phi_" + std::to_string(j);
  }
  out += "   sigma\n";
  for (const MethodAggregate& aggregate : report.aggregates) {
    out += aggregate.method_label;
    out += std::string(label_width - aggregate.method_label.size(), ' ');
    if (aggregate.runs_ok == 0) {
      out += "   (all " + std::to_string(aggregate.runs_failed) + " runs failed)\n";
      continue;
    }
    for (double value : aggregate.mean_phi) {
      out += "  " + format_fixed(value);
    }
    out += "  " + format_fixed(aggregate.mean_sigma);
    if (aggregate.runs_failed > 0) {
      out += "   (" + std::to_string(aggregate.runs_failed) + " failed)";
    }
    out += '\n';
  }

  bool any_confusion = false;
  for (const MethodAggregate& aggregate : report.aggregates) {
    if (aggregate.mean_confusion.has_value()) {
      any_confusion = true;
    }
  }
  if (any_confusion) {
    out += "\nFilter performance (mean counts over seeds)\n";
    out += std::string(label_width, ' ');
    out += "             NF         F\n";
    for (const MethodAggregate& aggregate : report.aggregates) {
      if (!aggregate.mean_confusion.has_value()) {
        continue;
      }
      const std::vector<double>& confusion = *aggregate.mean_confusion;
      out += aggregate.method_label;
      out += std::string(label_width - aggregate.method_label.size(), ' ');
      out += "  clean   " + format_fixed(confusion[0]) + "  " + format_fixed(confusion[1]) + "\n";
      out += std::string(label_width, ' ');
      out += "  outlier " + format_fixed(confusion[2]) + "  " + format_fixed(confusion[3]) + "\n";
    }
  }
  return out;
}

std::string render_csv(const BenchReport& report) {
  int p = 0;
  int q = 0;
  for (const RunRecord& run : report.runs) {
    p = std::max(p, static_cast<int>(run.phi.size()));
    q = std::max(q, static_cast<int>(run.theta.size()));
  }

  std::string out = "record,method,seed";
  for (int j = 1; j <= p; ++j) {
    out += ",phi_" + std::to_string(j);
  }
  for (int j = 1; j <= q; ++j) {
    out += ",theta_" + std::to_string(j);
  }
  out += ",sigma,clean_not_flagged,clean_flagged,outlier_not_flagged,outlier_flagged,error\n";

  const auto append_values = [&](const std::vector<double>& phi,
                                 const std::vector<double>& theta, double sigma) {
    for (int j = 0; j < p; ++j) {
      out += ',';
      if (j < static_cast<int>(phi.size())) {
        out += format_full(phi[static_cast<std::size_t>(j)]);
      }
    }
    for (int j = 0; j < q; ++j) {
      out += ',';
      if (j < static_cast<int>(theta.size())) {
        out += format_full(theta[static_cast<std::size_t>(j)]);
      }
    }
    out += ',' + format_full(sigma);
  };

  for (const RunRecord& run : report.runs) {
    out += "run," + csv_escape(run.method_label) + ',' + std::to_string(run.seed);
    if (run.ok) {
      append_values(run.phi, run.theta, run.sigma);
      if (run.diagnostics.confusion.has_value()) {
        const ConfusionCounts& counts = *run.diagnostics.confusion;
        out += ',' + std::to_string(counts.clean_not_flagged) + ',' +
               std::to_string(counts.clean_flagged) + ',' +
               std::to_string(counts.outlier_not_flagged) + ',' +
               std::to_string(counts.outlier_flagged);
      } else {
        out += ",,,,";
      }
      out += ',';
    } else {
      for (int j = 0; j < p + q; ++j) {
        out += ',';
      }
      out += ",,,,,";
      out += csv_escape(run.error);
    }
    out += '\n';
  }

  for (const MethodAggregate& aggregate : report.aggregates) {
    if (aggregate.runs_ok == 0) {
      continue;
    }
    out += "aggregate_mean," + csv_escape(aggregate.method_label) + ',';
    append_values(aggregate.mean_phi, {}, aggregate.mean_sigma);
    if (aggregate.mean_confusion.has_value()) {
      const std::vector<double>& confusion = *aggregate.mean_confusion;
      for (double value : confusion) {
        out += ',' + format_full(value);
      }
    } else {
      out += ",,,,";
    }
    out += ",\n";
    out += "aggregate_median," + csv_escape(aggregate.method_label) + ',';
    append_values(aggregate.median_phi, {}, aggregate.median_sigma);
    out += ",,,,,\n";
  }
  return out;
}

std::string render_json(const BenchReport& report) {
  nlohmann::json doc;
  doc["config_digest"] = report.config_digest;
  doc["runs"] = nlohmann::json::array();
  for (const RunRecord& run : report.runs) {
    nlohmann::json entry = {{"method", run.method_label},
                            {"seed", run.seed},
                            {"ok", run.ok}};
    if (run.ok) {
      entry["phi"] = run.phi;
      if (!run.theta.empty()) {
        entry["theta"] = run.theta;
      }
      entry["sigma"] = run.sigma;
      entry["diagnostics"] = diagnostics_to_json(run.diagnostics);
    } else {
      entry["error"] = run.error;
    }
    doc["runs"].push_back(std::move(entry));
  }
  doc["aggregates"] = nlohmann::json::object();
  for (const MethodAggregate& aggregate : report.aggregates) {
    nlohmann::json entry = {{"runs_ok", aggregate.runs_ok},
                            {"runs_failed", aggregate.runs_failed}};
    if (aggregate.runs_ok > 0) {
      entry["mean_phi"] = aggregate.mean_phi;
      entry["median_phi"] = aggregate.median_phi;
      entry["mean_sigma"] = aggregate.mean_sigma;
      entry["median_sigma"] = aggregate.median_sigma;
      if (aggregate.mean_confusion.has_value()) {
        const std::vector<double>& confusion = *aggregate.mean_confusion;
        entry["mean_confusion"] = {{"clean_not_flagged", confusion[0]},
                                   {"clean_flagged", confusion[1]},
                                   {"outlier_not_flagged", confusion[2]},
                                   {"outlier_flagged", confusion[3]}};
      }
    }
    doc["aggregates"][aggregate.method_label] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_tables(const BenchReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::text:
      return render_text(report);
    case ReportFormat::csv:
      return render_csv(report);
    case ReportFormat::json:
      return render_json(report);
  }
  throw std::logic_error("unreachable");
}

}  // namespace cellarma

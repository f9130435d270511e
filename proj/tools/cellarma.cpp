// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: simulate ARMA series, contaminate them cell by
// cell, run the univariate filters and the robust estimation pipelines,
// and drive seeded Monte Carlo studies from a JSON config.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cellarma/arma.hpp"
#include "cellarma/bench.hpp"
#include "cellarma/contamination.hpp"
#include "cellarma/estimators.hpp"
#include "cellarma/filters.hpp"
#include "cellarma/io.hpp"

namespace {

using cellarma::ExperimentConfig;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOptions* options) {
  cmd->add_option("--config", options->config_path,
                  "JSON experiment config supplying defaults (flags override)");
  cmd->add_option("--out", options->out_path, "output file (stdout when omitted)");
  cmd->add_option("--seed", options->seed, "random seed")->capture_default_str();
}

std::optional<ExperimentConfig> load_config(const CommonOptions& options) {
  if (options.config_path.empty()) {
    return std::nullopt;
  }
  const nlohmann::json doc = nlohmann::json::parse(cellarma::read_text_file(options.config_path));
  return cellarma::config_from_json(doc);
}

void emit(const CommonOptions& options, const std::string& content) {
  if (options.out_path.empty()) {
    std::cout << content;
  } else {
    cellarma::write_text_file(options.out_path, content);
  }
}

// Model parameters assembled from config defaults and explicit flags.
struct ModelOptions {
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma = 1.0;
  int length = 1000;
  bool sigma_set = false;
  bool length_set = false;
};

void add_model(CLI::App* cmd, ModelOptions* options) {
  cmd->add_option("--phi", options->phi, "AR coefficients")->delimiter(',');
  cmd->add_option("--theta", options->theta, "MA coefficients")->delimiter(',');
  cmd->add_option("--sigma", options->sigma, "innovation standard deviation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--length", options->length, "series length")->check(CLI::PositiveNumber);
}

cellarma::ArmaModel resolve_model(const ModelOptions& options,
                                  const std::optional<ExperimentConfig>& config) {
  std::vector<double> phi = options.phi;
  std::vector<double> theta = options.theta;
  double sigma = options.sigma;
  int length = options.length;
  if (config.has_value()) {
    if (phi.empty() && theta.empty()) {
      phi = config->phi;
      theta = config->theta;
    }
    if (!options.sigma_set) {
      sigma = config->sigma;
    }
    if (!options.length_set) {
      length = config->length;
    }
  }
  (void)length;
  return cellarma::ArmaModel(phi, theta, sigma);
}

int resolve_length(const ModelOptions& options, const std::optional<ExperimentConfig>& config) {
  if (!options.length_set && config.has_value()) {
    return config->length;
  }
  return options.length;
}

cellarma::TimeSeries load_series(const std::string& path) {
  const std::string text = cellarma::read_text_file(path);
  if (text.rfind("observed,", 0) == 0) {
    return cellarma::contaminated_from_csv(text).observed;
  }
  return cellarma::series_from_csv(text);
}

cellarma::FilterId parse_filter(const std::string& name) {
  if (name == "ugy") {
    return cellarma::FilterId::UGY;
  }
  if (name == "uhs") {
    return cellarma::FilterId::UHS;
  }
  throw std::runtime_error("unknown filter '" + name + "' (expected ugy or uhs)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cellwise-robust ARMA toolkit"};
  app.require_subcommand(1);

  // ----- simulate -----
  CommonOptions sim_common;
  ModelOptions sim_model;
  int burn_in = cellarma::kDefaultBurnIn;
  CLI::App* sim = app.add_subcommand("simulate", "simulate a clean ARMA series");
  add_common(sim, &sim_common);
  add_model(sim, &sim_model);
  sim->add_option("--burn-in", burn_in, "warm-up samples to discard")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // ----- contaminate -----
  CommonOptions con_common;
  ModelOptions con_model;
  std::string con_in;
  std::string ledger_in;
  std::string ledger_out;
  int period = 0;
  double value = 4.0;
  int start = 1;
  double p_additive = -1.0;
  double p_innovative = 0.0;
  double magnitude_sd = 1.0;
  CLI::App* con = app.add_subcommand("contaminate", "inject cellwise outliers");
  add_common(con, &con_common);
  add_model(con, &con_model);
  con->add_option("--in", con_in, "clean series CSV (simulated when omitted)");
  con->add_option("--period", period, "periodic replacement: period");
  con->add_option("--value", value, "periodic replacement: value");
  con->add_option("--start", start, "periodic replacement: 1-based start cell");
  con->add_option("--p-additive", p_additive, "Bernoulli AO probability per cell");
  con->add_option("--p-innovative", p_innovative, "Bernoulli IO probability per cell");
  con->add_option("--magnitude-sd", magnitude_sd, "Bernoulli magnitude standard deviation");
  con->add_option("--ledger", ledger_in, "explicit outlier ledger JSON to inject");
  con->add_option("--ledger-out", ledger_out, "write the resulting ledger JSON here");

  // ----- filter -----
  CommonOptions fil_common;
  std::string fil_in;
  std::string fil_name = "uhs";
  double fil_alpha = 0.88;
  CLI::App* fil = app.add_subcommand("filter", "flag outlying cells");
  add_common(fil, &fil_common);
  fil->add_option("--in", fil_in, "series CSV (observed column used if contaminated)")
      ->required();
  fil->add_option("--filter", fil_name, "ugy or uhs")->capture_default_str();
  fil->add_option("--alpha", fil_alpha, "base quantile")->capture_default_str();

  // ----- fit -----
  CommonOptions fit_common;
  std::string fit_in;
  std::string fit_method = "yw";
  std::string fit_filter = "uhs";
  double fit_alpha = 0.88;
  int fit_p = 3;
  int fit_q = 0;
  int fit_m = 0;
  CLI::App* fit = app.add_subcommand("fit", "estimate AR/ARMA parameters");
  add_common(fit, &fit_common);
  fit->add_option("--in", fit_in, "series CSV (observed column used if contaminated)")
      ->required();
  fit->add_option("--method", fit_method, "yw | hr | artsgs | ars | nofilter-s")
      ->capture_default_str();
  fit->add_option("--p", fit_p, "AR order")->capture_default_str();
  fit->add_option("--q", fit_q, "MA order (hr only)")->capture_default_str();
  fit->add_option("--m", fit_m, "long AR order for hr (0 = default rule)");
  fit->add_option("--filter", fit_filter, "filter for artsgs/ars")->capture_default_str();
  fit->add_option("--alpha", fit_alpha, "filter base quantile")->capture_default_str();

  // ----- bench -----
  CommonOptions bench_common;
  std::string bench_format = "json";
  CLI::App* bench = app.add_subcommand("bench", "run a seeded Monte Carlo study");
  add_common(bench, &bench_common);
  bench->add_option("--format", bench_format, "text | csv | json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      sim_model.sigma_set = sim->count("--sigma") > 0;
      sim_model.length_set = sim->count("--length") > 0;
      const auto config = load_config(sim_common);
      const cellarma::ArmaModel model = resolve_model(sim_model, config);
      const cellarma::TimeSeries series =
          cellarma::simulate(model, resolve_length(sim_model, config), sim_common.seed, burn_in);
      emit(sim_common, cellarma::series_to_csv(series));
    } else if (con->parsed()) {
      con_model.sigma_set = con->count("--sigma") > 0;
      con_model.length_set = con->count("--length") > 0;
      const auto config = load_config(con_common);
      const cellarma::ArmaModel model = resolve_model(con_model, config);

      cellarma::TimeSeries clean;
      if (con_in.empty()) {
        clean = cellarma::simulate(model, resolve_length(con_model, config), con_common.seed);
      } else {
        clean = cellarma::series_from_csv(cellarma::read_text_file(con_in));
      }

      cellarma::ContaminatedSeries result;
      if (!ledger_in.empty()) {
        const auto specs = cellarma::ledger_from_json(
            nlohmann::json::parse(cellarma::read_text_file(ledger_in)));
        result = cellarma::inject(model, clean, specs);
      } else if (con->count("--p-additive") > 0 || con->count("--p-innovative") > 0) {
        cellarma::BernoulliContamSpec spec;
        spec.p_additive = std::max(0.0, p_additive);
        spec.p_innovative = p_innovative;
        spec.magnitude_sd = magnitude_sd;
        result = cellarma::bernoulli_contaminate(model, resolve_length(con_model, config),
                                                 spec, con_common.seed);
      } else {
        int use_period = period;
        double use_value = value;
        int use_start = start;
        if (use_period == 0 && config.has_value() && config->periodic.has_value()) {
          use_period = config->periodic->period;
          use_value = config->periodic->value;
          use_start = config->periodic->start;
        }
        if (use_period == 0) {
          throw std::runtime_error(
              "select a contamination mechanism: --period, --p-additive/--p-innovative, "
              "or --ledger");
        }
        result = cellarma::periodic_contaminate(clean, use_period, use_value, use_start);
      }

      emit(con_common, cellarma::contaminated_to_csv(result));
      if (!ledger_out.empty()) {
        cellarma::write_text_file(ledger_out,
                                  cellarma::ledger_to_json(result.ledger).dump(2) + "\n");
      }
    } else if (fil->parsed()) {
      const auto config = load_config(fil_common);
      (void)config;
      const std::string text = cellarma::read_text_file(fil_in);
      std::vector<bool> truth;
      cellarma::TimeSeries series;
      if (text.rfind("observed,", 0) == 0) {
        cellarma::ContaminatedSeries parsed = cellarma::contaminated_from_csv(text);
        series = std::move(parsed.observed);
        truth = std::move(parsed.cell_truth);
      } else {
        series = cellarma::series_from_csv(text);
      }
      const cellarma::FilterId filter_id = parse_filter(fil_name);
      const cellarma::FlagVector flags = filter_id == cellarma::FilterId::UHS
                                             ? cellarma::hs_filter(series, fil_alpha)
                                             : cellarma::gy_filter(series, fil_alpha);
      emit(fil_common, cellarma::flags_to_csv(flags));
      if (!truth.empty()) {
        const cellarma::ConfusionCounts counts = cellarma::flag_metrics(flags, truth);
        std::cerr << "          NF      F\n"
                  << "clean   " << counts.clean_not_flagged << "  " << counts.clean_flagged
                  << "\noutlier " << counts.outlier_not_flagged << "  "
                  << counts.outlier_flagged << "\n";
      }
    } else if (fit->parsed()) {
      const auto config = load_config(fit_common);
      if (config.has_value() && fit->count("--p") == 0) {
        fit_p = config->effective_p();
      }
      if (config.has_value() && fit->count("--q") == 0) {
        fit_q = config->fit_q;
      }
      const cellarma::TimeSeries series = load_series(fit_in);

      nlohmann::json doc;
      if (fit_method == "yw") {
        doc = cellarma::fit_to_json(cellarma::yule_walker(series, fit_p));
      } else if (fit_method == "hr") {
        const int m = fit_m > 0 ? fit_m
                                : cellarma::hannan_rissanen_default_order(series.length(),
                                                                          fit_p, fit_q);
        doc = cellarma::fit_to_json(cellarma::hannan_rissanen(series, fit_p, fit_q, m));
      } else if (fit_method == "artsgs") {
        doc = cellarma::fit_to_json(
            cellarma::artsgs(series, fit_p, parse_filter(fit_filter), fit_alpha));
      } else if (fit_method == "ars") {
        doc = cellarma::fit_to_json(
            cellarma::ars(series, fit_p, parse_filter(fit_filter), fit_alpha));
      } else if (fit_method == "nofilter-s") {
        doc = cellarma::fit_to_json(cellarma::nofilter_s(series, fit_p));
      } else {
        throw std::runtime_error("unknown method '" + fit_method + "'");
      }
      emit(fit_common, doc.dump(2) + "\n");
    } else if (bench->parsed()) {
      if (bench_common.config_path.empty()) {
        throw std::runtime_error("bench requires --config");
      }
      const auto config = load_config(bench_common);
      const cellarma::BenchReport report = cellarma::run_experiment(*config);

      cellarma::ReportFormat format = cellarma::ReportFormat::json;
      if (bench_format == "text") {
        format = cellarma::ReportFormat::text;
      } else if (bench_format == "csv") {
        format = cellarma::ReportFormat::csv;
      } else if (bench_format != "json") {
        throw std::runtime_error("unknown format '" + bench_format + "'");
      }
      emit(bench_common, cellarma::render_tables(report, format));
      if (!bench_common.out_path.empty()) {
        std::cerr << cellarma::render_tables(report, cellarma::ReportFormat::text);
      }
      if (report.has_failures()) {
        return 2;
      }
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}

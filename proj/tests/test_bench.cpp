// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <sys/wait.h>

#include "cellarma/bench.hpp"
#include "cellarma/estimators.hpp"
#include "cellarma/io.hpp"

using cellarma::BenchReport;
using cellarma::ExperimentConfig;
using nlohmann::json;

namespace {

json tiny_config() {
  return json::parse(R"({
    "model": {"phi": [0.5], "sigma": 1.0},
    "length": 300,
    "methods": [{"kind": "yw"}, {"kind": "hr"}],
    "seeds": [2, 1]
  })");
}

json dense_config() {
  return json::parse(R"({
    "model": {"phi": [0.5, 0.2, 0.2], "sigma": 1.0},
    "length": 1000,
    "contamination": {"periodic": {"period": 7, "value": 4.0, "start": 1}},
    "methods": [
      {"kind": "artsgs", "filter": "uhs", "alpha": 0.88},
      {"kind": "ars", "filter": "uhs", "alpha": 0.88}
    ],
    "seeds": [1]
  })");
}

json failing_config() {
  // fit.q = 40 makes hannan_rissanen impossible at length 50; yule_walker
  // still succeeds, so the report mixes ok and failed runs.
  return json::parse(R"({
    "model": {"phi": [0.5], "sigma": 1.0},
    "length": 50,
    "fit": {"p": 1, "q": 40},
    "methods": [{"kind": "yw"}, {"kind": "hr"}],
    "seeds": [1]
  })");
}

int run_cli(const std::string& args) {
  const std::string command = std::string(CELLARMA_CLI_PATH) + " " + args;
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing applies defaults and labels") {
  const ExperimentConfig config = cellarma::config_from_json(dense_config());
  CHECK(config.effective_p() == 3);
  CHECK(config.length == 1000);
  REQUIRE(config.methods.size() == 2);
  CHECK(config.methods[0].label == "UHS88");
  CHECK(config.methods[1].label == "UHS88CC");
  REQUIRE(config.periodic.has_value());
  CHECK(config.periodic->period == 7);

  const ExperimentConfig tiny = cellarma::config_from_json(tiny_config());
  CHECK(tiny.methods[0].label == "YW");
  CHECK(tiny.methods[1].label == "HR");
  CHECK(tiny.effective_p() == 1);
}

TEST_CASE("config parsing rejects invalid documents") {
  json no_methods = tiny_config();
  no_methods["methods"] = json::array();
  CHECK_THROWS_AS(cellarma::config_from_json(no_methods), std::runtime_error);

  json no_seeds = tiny_config();
  no_seeds["seeds"] = json::array();
  CHECK_THROWS_AS(cellarma::config_from_json(no_seeds), std::runtime_error);

  json bad_kind = tiny_config();
  bad_kind["methods"][0]["kind"] = "mle";
  CHECK_THROWS_AS(cellarma::config_from_json(bad_kind), std::runtime_error);

  json no_filter = tiny_config();
  no_filter["methods"][0]["kind"] = "artsgs";
  CHECK_THROWS_AS(cellarma::config_from_json(no_filter), std::runtime_error);

  json bad_alpha = dense_config();
  bad_alpha["methods"][0]["alpha"] = 1.5;
  CHECK_THROWS_AS(cellarma::config_from_json(bad_alpha), std::runtime_error);

  json duplicate = tiny_config();
  duplicate["methods"][1]["label"] = "YW";
  CHECK_THROWS_AS(cellarma::config_from_json(duplicate), std::runtime_error);

  json two_mechanisms = dense_config();
  two_mechanisms["contamination"]["bernoulli"] = {{"p_additive", 0.05}};
  CHECK_THROWS_AS(cellarma::config_from_json(two_mechanisms), std::runtime_error);

  json unstable = tiny_config();
  unstable["model"]["phi"] = {1.0};
  CHECK_THROWS_AS(cellarma::config_from_json(unstable), std::exception);
}

TEST_CASE("config digest is stable across serialization round trips") {
  const ExperimentConfig config = cellarma::config_from_json(dense_config());
  const std::string digest = cellarma::config_digest(config);
  CHECK(digest.size() == 16);
  CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);

  const ExperimentConfig reparsed =
      cellarma::config_from_json(cellarma::config_to_json(config));
  CHECK(cellarma::config_digest(reparsed) == digest);

  ExperimentConfig changed = config;
  changed.seeds.push_back(99);
  CHECK(cellarma::config_digest(changed) != digest);
}

TEST_CASE("run_experiment visits seeds in ascending order and aggregates means") {
  const ExperimentConfig config = cellarma::config_from_json(tiny_config());
  const BenchReport report = cellarma::run_experiment(config);

  REQUIRE(report.runs.size() == 4);
  CHECK(report.runs[0].seed == 1);
  CHECK(report.runs[1].seed == 1);
  CHECK(report.runs[2].seed == 2);
  CHECK(report.runs[3].seed == 2);
  CHECK(report.runs[0].method_label == "YW");
  CHECK(report.runs[1].method_label == "HR");
  for (const cellarma::RunRecord& run : report.runs) {
    CHECK(run.ok);
    CHECK(run.error.empty());
  }
  CHECK_FALSE(report.has_failures());

  REQUIRE(report.aggregates.size() == 2);
  const cellarma::MethodAggregate& yw = report.aggregates[0];
  CHECK(yw.method_label == "YW");
  CHECK(yw.runs_ok == 2);
  CHECK(yw.runs_failed == 0);
  const double expected_mean = (report.runs[0].phi[0] + report.runs[2].phi[0]) / 2.0;
  CHECK(std::abs(yw.mean_phi[0] - expected_mean) < 1e-12);
  const double expected_sigma = (report.runs[0].sigma + report.runs[2].sigma) / 2.0;
  CHECK(std::abs(yw.mean_sigma - expected_sigma) < 1e-12);
}

TEST_CASE("identical configs produce byte-identical reports") {
  const ExperimentConfig config = cellarma::config_from_json(tiny_config());
  const BenchReport first = cellarma::run_experiment(config);
  const BenchReport second = cellarma::run_experiment(config);
  for (const cellarma::ReportFormat format :
       {cellarma::ReportFormat::text, cellarma::ReportFormat::csv,
        cellarma::ReportFormat::json}) {
    CHECK(cellarma::render_tables(first, format) == cellarma::render_tables(second, format));
  }
}

TEST_CASE("per-run failures are captured, not fatal") {
  const ExperimentConfig config = cellarma::config_from_json(failing_config());
  const BenchReport report = cellarma::run_experiment(config);
  REQUIRE(report.runs.size() == 2);
  CHECK(report.runs[0].ok);         // yw
  CHECK_FALSE(report.runs[1].ok);   // hr
  CHECK_FALSE(report.runs[1].error.empty());
  CHECK(report.has_failures());

  const cellarma::MethodAggregate& hr = report.aggregates[1];
  CHECK(hr.runs_ok == 0);
  CHECK(hr.runs_failed == 1);

  const std::string text = cellarma::render_tables(report, cellarma::ReportFormat::text);
  CHECK(text.find("failed") != std::string::npos);
  const std::string csv = cellarma::render_tables(report, cellarma::ReportFormat::csv);
  CHECK(csv.find(report.runs[1].error) != std::string::npos);
  const json doc = json::parse(cellarma::render_tables(report, cellarma::ReportFormat::json));
  CHECK(doc.at("runs")[1].at("ok") == false);
}

TEST_CASE("the dense experiment report carries filter confusion tables") {
  const ExperimentConfig config = cellarma::config_from_json(dense_config());
  const BenchReport report = cellarma::run_experiment(config);
  CHECK_FALSE(report.has_failures());
  for (const cellarma::MethodAggregate& aggregate : report.aggregates) {
    REQUIRE(aggregate.mean_confusion.has_value());
    const std::vector<double>& confusion = *aggregate.mean_confusion;
    CHECK(confusion[0] + confusion[1] + confusion[2] + confusion[3] ==
          doctest::Approx(1000.0).epsilon(1e-12));
  }
  const std::string text = cellarma::render_tables(report, cellarma::ReportFormat::text);
  CHECK(text.find("config " + report.config_digest) != std::string::npos);
  CHECK(text.find("phi_1") != std::string::npos);
  CHECK(text.find("sigma") != std::string::npos);
  CHECK(text.find("NF") != std::string::npos);
  CHECK(text.find("UHS88CC") != std::string::npos);
  CHECK(text.find("outlier") != std::string::npos);

  const std::string csv = cellarma::render_tables(report, cellarma::ReportFormat::csv);
  CHECK(csv.find("aggregate_mean,UHS88") != std::string::npos);
  CHECK(csv.find("aggregate_median,UHS88CC") != std::string::npos);
}

TEST_CASE("cli: simulate matches the library simulation") {
  const int code =
      run_cli("simulate --phi 0.5 --length 50 --seed 3 --out bench_cli_sim.tmp");
  REQUIRE(code == 0);
  const cellarma::TimeSeries parsed =
      cellarma::series_from_csv(cellarma::read_text_file("bench_cli_sim.tmp"));
  REQUIRE(parsed.length() == 50);
  const cellarma::TimeSeries direct =
      cellarma::simulate(cellarma::ArmaModel({0.5}, {}, 1.0), 50, 3);
  CHECK(parsed.values == direct.values);
  std::remove("bench_cli_sim.tmp");
}

TEST_CASE("cli: bench runs a config deterministically") {
  cellarma::write_text_file("bench_cli_cfg.tmp", tiny_config().dump(2));
  REQUIRE(run_cli("bench --config bench_cli_cfg.tmp --format csv --out bench_cli_a.tmp "
                  "2>/dev/null") == 0);
  REQUIRE(run_cli("bench --config bench_cli_cfg.tmp --format csv --out bench_cli_b.tmp "
                  "2>/dev/null") == 0);
  const std::string first = cellarma::read_text_file("bench_cli_a.tmp");
  const std::string second = cellarma::read_text_file("bench_cli_b.tmp");
  CHECK(first == second);
  CHECK(first.find("aggregate_mean,YW") != std::string::npos);

  // JSON output carries the digest of the parsed config.
  REQUIRE(run_cli("bench --config bench_cli_cfg.tmp --format json --out bench_cli_c.tmp "
                  "2>/dev/null") == 0);
  const json doc = json::parse(cellarma::read_text_file("bench_cli_c.tmp"));
  CHECK(doc.at("config_digest") ==
        cellarma::config_digest(cellarma::config_from_json(tiny_config())));

  std::remove("bench_cli_cfg.tmp");
  std::remove("bench_cli_a.tmp");
  std::remove("bench_cli_b.tmp");
  std::remove("bench_cli_c.tmp");
}

TEST_CASE("cli: partial failures exit with code 2, bad input with 1") {
  cellarma::write_text_file("bench_cli_fail.tmp", failing_config().dump(2));
  CHECK(run_cli("bench --config bench_cli_fail.tmp --format json --out bench_cli_d.tmp "
                "2>/dev/null") == 2);
  std::remove("bench_cli_fail.tmp");
  std::remove("bench_cli_d.tmp");

  CHECK(run_cli("bench --format json 2>/dev/null") == 1);  // missing --config
  CHECK(run_cli("fit --in does_not_exist.csv 2>/dev/null") == 1);
}

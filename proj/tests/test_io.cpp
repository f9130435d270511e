// Copyright 2026 cellarma authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <stdexcept>
#include <string>

#include "cellarma/arma.hpp"
#include "cellarma/contamination.hpp"
#include "cellarma/estimators.hpp"
#include "cellarma/filters.hpp"
#include "cellarma/io.hpp"

using cellarma::ContaminatedSeries;
using cellarma::FlagVector;
using cellarma::OutlierKind;
using cellarma::OutlierSpec;
using cellarma::TimeSeries;

namespace {

const cellarma::ArmaModel& ar3() {
  static const cellarma::ArmaModel model({0.5, 0.2, 0.2}, {}, 1.0);
  return model;
}

}  // namespace

TEST_CASE("series CSV round trip is exact") {
  const TimeSeries series = cellarma::simulate(ar3(), 100, 7);
  const std::string csv = cellarma::series_to_csv(series);
  CHECK(csv.rfind("value\n", 0) == 0);
  const TimeSeries parsed = cellarma::series_from_csv(csv);
  REQUIRE(parsed.length() == series.length());
  CHECK(parsed.values == series.values);  // %.17g preserves every bit
}

TEST_CASE("series CSV handles awkward values") {
  const TimeSeries series{{0.0, -0.1, 1e-300, 1.7976931348623157e308},
                          cellarma::SeriesOrigin::clean};
  const TimeSeries parsed = cellarma::series_from_csv(cellarma::series_to_csv(series));
  CHECK(parsed.values == series.values);
}

TEST_CASE("series CSV parsing reports bad headers and fields") {
  CHECK_THROWS_AS(cellarma::series_from_csv(""), std::runtime_error);
  CHECK_THROWS_AS(cellarma::series_from_csv("wrong\n1.0\n"), std::runtime_error);
  CHECK_THROWS_WITH_AS(cellarma::series_from_csv("value\n1.0\nnot-a-number\n"),
                       doctest::Contains("line 3"), std::runtime_error);
}

TEST_CASE("contaminated CSV round trip preserves all three columns") {
  const TimeSeries clean = cellarma::simulate(ar3(), 200, 3);
  const ContaminatedSeries data = cellarma::periodic_contaminate(clean, 7, 4.0, 1);
  const std::string csv = cellarma::contaminated_to_csv(data);
  const ContaminatedSeries parsed = cellarma::contaminated_from_csv(csv);
  CHECK(parsed.observed.values == data.observed.values);
  CHECK(parsed.clean.values == data.clean.values);
  CHECK(parsed.cell_truth == data.cell_truth);
}

TEST_CASE("contaminated CSV rejects malformed rows") {
  CHECK_THROWS_AS(cellarma::contaminated_from_csv("observed,clean,truth_flag\n1.0,2.0\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(cellarma::contaminated_from_csv("observed,clean,truth_flag\n1.0,2.0,2\n"),
                  std::runtime_error);
}

TEST_CASE("flag CSV round trips") {
  FlagVector flags;
  flags.flags = {true, false, false, true, true};
  const std::string csv = cellarma::flags_to_csv(flags);
  CHECK(csv == "flag\n1\n0\n0\n1\n1\n");
  CHECK(cellarma::flags_from_csv(csv) == flags.flags);
  CHECK_THROWS_AS(cellarma::flags_from_csv("flag\n2\n"), std::runtime_error);
}

TEST_CASE("embedded CSV leaves masked cells empty") {
  const TimeSeries series{{1.0, 2.0, 3.0, 4.0}, cellarma::SeriesOrigin::clean};
  FlagVector flags;
  flags.flags = {false, false, true, false};
  const cellarma::EmbeddedMatrix matrix = cellarma::embed(series, 1, &flags);
  const std::string csv = cellarma::embedded_to_csv(matrix);
  CHECK(csv ==
        "lag0,lag1\n"
        "2,1\n"
        ",2\n"
        "4,\n");
}

TEST_CASE("ledger JSON round trips") {
  const std::vector<OutlierSpec> ledger = {
      OutlierSpec{OutlierKind::additive, 5, 4.0},
      OutlierSpec{OutlierKind::innovative, 17, -2.25},
  };
  const nlohmann::json doc = cellarma::ledger_to_json(ledger);
  const std::vector<OutlierSpec> parsed = cellarma::ledger_from_json(doc);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].kind == OutlierKind::additive);
  CHECK(parsed[0].time == 5);
  CHECK(parsed[0].magnitude == 4.0);
  CHECK(parsed[1].kind == OutlierKind::innovative);
  CHECK(parsed[1].time == 17);
  CHECK(parsed[1].magnitude == -2.25);
}

TEST_CASE("ledger JSON rejects malformed documents") {
  CHECK_THROWS_AS(cellarma::ledger_from_json(nlohmann::json::object()), std::runtime_error);
  nlohmann::json bad_kind = nlohmann::json::array();
  bad_kind.push_back({{"kind", "seasonal"}, {"time", 1}, {"magnitude", 1.0}});
  CHECK_THROWS_AS(cellarma::ledger_from_json(bad_kind), std::runtime_error);
}

TEST_CASE("AR fit serializes method, parameters and diagnostics") {
  const TimeSeries series = cellarma::simulate(ar3(), 500, 9);
  const cellarma::ArFit fit = cellarma::yule_walker(series, 3);
  const nlohmann::json doc = cellarma::fit_to_json(fit);
  CHECK(doc.at("method") == "yw");
  CHECK(doc.at("phi").size() == 3);
  CHECK(doc.at("sigma").get<double>() == fit.sigma);
  CHECK(doc.at("diagnostics").contains("iterations"));
  CHECK_FALSE(doc.at("diagnostics").contains("confusion"));
}

TEST_CASE("pipeline fit serializes its confusion block") {
  const TimeSeries clean = cellarma::simulate(ar3(), 1000, 2);
  const ContaminatedSeries data = cellarma::periodic_contaminate(clean, 7, 4.0, 1);
  const cellarma::ArFit fit =
      cellarma::artsgs(data.observed, 3, cellarma::FilterId::UHS, 0.88, &data.cell_truth);
  const nlohmann::json doc = cellarma::fit_to_json(fit);
  CHECK(doc.at("method") == "artsgs");
  const nlohmann::json& confusion = doc.at("diagnostics").at("confusion");
  CHECK(confusion.at("outlier_flagged").get<int>() +
            confusion.at("outlier_not_flagged").get<int>() ==
        143);
}

TEST_CASE("ARMA fit serializes phi and theta") {
  const cellarma::ArmaModel model({0.5}, {0.4}, 1.0);
  const TimeSeries series = cellarma::simulate(model, 2000, 4);
  const cellarma::ArmaFit fit = cellarma::hannan_rissanen(series, 1, 1, 15);
  const nlohmann::json doc = cellarma::fit_to_json(fit);
  CHECK(doc.at("method") == "hr");
  CHECK(doc.at("phi").size() == 1);
  CHECK(doc.at("theta").size() == 1);
  CHECK(doc.at("diagnostics").at("rows_used").get<int>() ==
        static_cast<int>(fit.residuals.size()));
}

TEST_CASE("text files round trip through the filesystem helpers") {
  const std::string path = "cellarma_io_test.tmp";
  const std::string content = "value\n1.5\n-2.5\n";
  cellarma::write_text_file(path, content);
  CHECK(cellarma::read_text_file(path) == content);
  std::remove(path.c_str());
  CHECK_THROWS_AS(cellarma::read_text_file(path), std::runtime_error);
}

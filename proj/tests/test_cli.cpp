#include "forgetting/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <stdexcept>

#include "doctest.h"
#include "forgetting/observables.hpp"
#include "json.hpp"

using forgetting::ObservableSet;
using forgetting::RunConfig;

TEST_CASE("doubles round-trip through the 17-digit format") {
  for (double v : {0.1, 1.0 / 3.0, 0.6321205588285577, 1e-300, 12345.678}) {
    const std::string text = forgetting::cli::format_double(v, "test");
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("non-finite values are refused") {
  CHECK_THROWS_AS((void)forgetting::cli::format_double(
                      std::numeric_limits<double>::quiet_NaN(), "test"),
                  std::runtime_error);
  CHECK_THROWS_AS((void)forgetting::cli::format_double(
                      std::numeric_limits<double>::infinity(), "test"),
                  std::runtime_error);
}

TEST_CASE("trace CSV has the fixed column layout") {
  RunConfig cfg;
  cfg.steps = 100;
  cfg.seed = 3;
  cfg.thresholds = {0.25};
  const RunConfig normalized = cfg.normalized();
  ObservableSet obs(normalized.thresholds);
  const auto records = forgetting::run_path(normalized, obs);

  std::ostringstream out;
  forgetting::cli::write_trace_header(out, normalized.thresholds);
  for (const auto& rec : records) {
    forgetting::cli::write_trace_row(out, 0, rec);
  }
  const std::string text = out.str();

  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("replicate,n,s_total,L,R,min_value,s@0.25", 0) == 0);
  CHECK(header.find(",W@0.25,") != std::string::npos);
  CHECK(header.substr(header.size() - 2) == ",N");

  std::string row;
  std::getline(lines, row);
  const auto commas = std::count(header.begin(), header.end(), ',');
  CHECK(std::count(row.begin(), row.end(), ',') == commas);
}

TEST_CASE("summary JSON carries the documented top-level keys in order") {
  forgetting::ExperimentPlan plan;
  plan.base.steps = 500;
  plan.base.seed = 21;
  plan.replicates = 4;
  plan.pools = {forgetting::cli::parse_pool("L", 500),
                forgetting::cli::parse_pool("symdiff", 500)};
  const auto summary = forgetting::run_ensemble(plan, 2);
  const std::string text = forgetting::cli::summary_json(plan, summary);

  const auto parsed = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (auto it = parsed.begin(); it != parsed.end(); ++it) {
    keys.push_back(it.key());
  }
  CHECK(keys == std::vector<std::string>{"plan", "per_checkpoint", "pools",
                                         "ks_results", "version", "seed"});
  CHECK(parsed["plan"]["replicates"] == 4);
  CHECK(parsed["pools"]["L"].size() == 4);
  CHECK(parsed["ks_results"].size() == 2);
  CHECK(parsed["seed"] == 21);
}

TEST_CASE("pool parsing accepts the documented names") {
  using forgetting::PoolSpec;
  CHECK(forgetting::cli::parse_pool("L", 9).kind == PoolSpec::Kind::kL);
  CHECK(forgetting::cli::parse_pool("size", 9).kind ==
        PoolSpec::Kind::kSizeCentered);
  const auto at = forgetting::cli::parse_pool("s@0.25", 9);
  CHECK(at.kind == PoolSpec::Kind::kSAt);
  CHECK(at.threshold == 0.25);
  CHECK_THROWS_AS((void)forgetting::cli::parse_pool("nope", 9),
                  std::invalid_argument);
}

TEST_CASE("report JSON and report lines reflect the checks") {
  forgetting::VerifyReport report;
  report.suite = "invariants";
  report.scale = "quick";
  report.seed = 5;
  forgetting::CheckResult pass;
  pass.name = "c13-theory-selfcheck";
  pass.status = forgetting::CheckStatus::kPass;
  pass.measured = 0.1;
  pass.tolerance = 1.0;
  pass.seconds = 0.25;
  forgetting::CheckResult skip;
  skip.name = "c04-lr-limit-law";
  skip.status = forgetting::CheckStatus::kSkippedScale;
  skip.details = "needs the n=1e6 ensemble";
  report.checks = {pass, skip};

  CHECK(report.all_passed());
  const auto parsed =
      nlohmann::ordered_json::parse(forgetting::cli::report_json(report));
  CHECK(parsed["passed"] == true);
  CHECK(parsed["checks"][0]["status"] == "pass");
  CHECK(parsed["checks"][1]["status"] == "skipped(scale)");

  CHECK(forgetting::cli::report_line(pass).rfind("[PASS] c13", 0) == 0);
  CHECK(forgetting::cli::report_line(skip).rfind("[SKIP] c04", 0) == 0);
}

TEST_CASE("simulate writes a parseable trace for a zero-step run") {
  forgetting::cli::SimulateOptions options;
  options.steps = 0;
  options.seed = 1;
  options.out = "test_zero_trace.csv";
  CHECK(forgetting::cli::run_simulate(options) == 0);

  std::ifstream in(options.out);
  REQUIRE(in.good());
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.rfind("0,0,1,1,0,0", 0) == 0);  // n=0, s_total=1, L=1, R=0
  std::string extra;
  CHECK(!std::getline(in, extra));
  std::remove(options.out.c_str());
}

#include "forgetting/montecarlo.hpp"

#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "forgetting/observables.hpp"
#include "forgetting/theory.hpp"

using forgetting::EnsembleSummary;
using forgetting::ExperimentPlan;
using forgetting::ObservableSet;
using forgetting::PoolSpec;
using forgetting::RunConfig;
using forgetting::run_ensemble;

namespace {
ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.base.steps = 2000;
  plan.base.seed = 777;
  plan.base.checkpoints = {1000, 2000};
  plan.replicates = 16;
  plan.pools = {
      {"L", PoolSpec::Kind::kL, 0.0, 2000},
      {"size", PoolSpec::Kind::kSizeCentered, 0.0, 2000},
  };
  return plan;
}
}  // namespace

TEST_CASE("a single-replicate ensemble equals the single path") {
  ExperimentPlan plan = small_plan();
  plan.replicates = 1;
  const EnsembleSummary summary = run_ensemble(plan, 1);

  RunConfig cfg = plan.base;
  cfg.replicate_index = 0;
  ObservableSet obs(cfg.normalized().thresholds);
  const auto records = forgetting::run_path(cfg, obs);

  REQUIRE(summary.per_checkpoint.size() == 2);
  CHECK(summary.per_checkpoint[1].scalars.at("s_total").mean ==
        static_cast<double>(records[1].s_total));
  CHECK(summary.per_checkpoint[0].scalars.at("L").mean ==
        static_cast<double>(records[0].L));
  CHECK(summary.pools.at("L")[0] ==
        static_cast<double>(records[1].L) / std::sqrt(2000.0));
}

TEST_CASE("worker count does not change the summary") {
  const EnsembleSummary one = run_ensemble(small_plan(), 1);
  const EnsembleSummary many = run_ensemble(small_plan(), 8);
  CHECK(one.replicates == many.replicates);
  CHECK(one.pools.at("L") == many.pools.at("L"));
  CHECK(one.pools.at("size") == many.pools.at("size"));
  REQUIRE(one.per_checkpoint.size() == many.per_checkpoint.size());
  for (std::size_t c = 0; c < one.per_checkpoint.size(); ++c) {
    for (const auto& [name, m] : one.per_checkpoint[c].scalars) {
      const auto& other = many.per_checkpoint[c].scalars.at(name);
      CHECK(m.count == other.count);
      CHECK(m.mean == other.mean);
      CHECK(m.m2 == other.m2);
    }
  }
}

TEST_CASE("the ensemble rejects malformed plans") {
  ExperimentPlan plan = small_plan();
  SUBCASE("zero replicates") {
    plan.replicates = 0;
    CHECK_THROWS_AS((void)run_ensemble(plan, 1), std::invalid_argument);
  }
  SUBCASE("pool checkpoint not in the grid") {
    plan.pools[0].checkpoint = 1234;
    CHECK_THROWS_AS((void)run_ensemble(plan, 1), std::invalid_argument);
  }
  SUBCASE("pool threshold not tracked") {
    plan.pools[0].kind = PoolSpec::Kind::kSAt;
    plan.pools[0].threshold = 0.123;
    CHECK_THROWS_AS((void)run_ensemble(plan, 1), std::invalid_argument);
  }
}

TEST_CASE("the mean size clears the coarse lower bound") {
  // At any run length the expected size exceeds (n+1)/4; at this n the
  // empirical mean sits near n/e, far above it.
  ExperimentPlan plan;
  plan.base.steps = 2000;
  plan.base.seed = 99;
  plan.replicates = 50;
  plan.pools = {{"size_raw", PoolSpec::Kind::kSizeRaw, 0.0, 2000}};
  const EnsembleSummary summary = run_ensemble(plan, 0);
  const auto m = forgetting::moments(summary.pools.at("size_raw"));
  CHECK(m.mean >= (2000.0 + 1.0) / 4.0);
  CHECK(m.mean / 2000.0 ==
        doctest::Approx(forgetting::theory::kMeanRate).epsilon(0.05));
}

TEST_CASE("path-property counters aggregate to zero violations") {
  ExperimentPlan plan = small_plan();
  const EnsembleSummary summary = run_ensemble(plan, 0);
  CHECK(summary.sandwich_violations == 0);
  CHECK(summary.r_growth_violations == 0);
}

TEST_CASE("suite names expand to their checks") {
  CHECK(forgetting::suite_targets("oracle") ==
        std::vector<std::string>{"c12-oracle-equivalence"});
  CHECK(forgetting::suite_targets("all").size() == 13);
  CHECK_THROWS_AS((void)forgetting::suite_targets("bogus"),
                  std::invalid_argument);
}

TEST_CASE("verify runs a named cheap target end to end") {
  const auto report =
      forgetting::verify_named({"c13-theory-selfcheck"}, "quick", 1);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].status == forgetting::CheckStatus::kPass);
  CHECK(report.all_passed());
}

TEST_CASE("quick scale skips the heavyweight ensembles rather than failing") {
  const auto report = forgetting::verify_named(
      {"c04-lr-limit-law", "c05-symdiff-law", "c07-near-critical-profile"},
      "quick", 1);
  for (const auto& check : report.checks) {
    CHECK(check.status == forgetting::CheckStatus::kSkippedScale);
  }
  CHECK(report.all_passed());
}

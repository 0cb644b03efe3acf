#include "forgetting/engine.hpp"

#include <algorithm>
#include <vector>

#include <stdexcept>

#include "doctest.h"
#include "forgetting/observables.hpp"
#include "forgetting/rng.hpp"
#include "forgetting/theory.hpp"

using forgetting::ObservableRecord;
using forgetting::ObservableSet;
using forgetting::ProcessState;
using forgetting::RunConfig;
using forgetting::UniformStream;

namespace {
std::vector<ObservableRecord> run(const RunConfig& cfg) {
  ObservableSet obs(cfg.normalized().thresholds);
  return forgetting::run_path(cfg, obs);
}
}  // namespace

TEST_CASE("an arrival above the minimum evicts it") {
  ProcessState state(std::vector<double>{0.0});
  const auto effect = state.step(0.5);
  CHECK(effect.pre_min == 0.0);
  CHECK(effect.evicted == 0.0);
  CHECK(state.sorted_elements() == std::vector<double>{0.5});
}

TEST_CASE("an arrival below the minimum grows the set") {
  ProcessState state(std::vector<double>{0.3, 0.7});
  const auto effect = state.step(0.1);
  CHECK(!effect.evicted.has_value());
  CHECK(state.sorted_elements() == std::vector<double>{0.1, 0.3, 0.7});
}

TEST_CASE("eviction removes exactly the minimum") {
  ProcessState state(std::vector<double>{0.3, 0.7});
  const auto effect = state.step(0.5);
  CHECK(effect.evicted == 0.3);
  CHECK(state.sorted_elements() == std::vector<double>{0.5, 0.7});
}

TEST_CASE("a tie with the minimum does not evict") {
  ProcessState state(std::vector<double>{0.5});
  const auto effect = state.step(0.5);
  CHECK(!effect.evicted.has_value());
  CHECK(state.size() == 2);
}

TEST_CASE("an empty start has no minimum to evict") {
  ProcessState state(std::vector<double>{});
  const auto effect = state.step(0.4);
  CHECK(!effect.pre_min.has_value());
  CHECK(!effect.evicted.has_value());
  CHECK(state.min() == 0.4);
}

TEST_CASE("the first two minima are 0 and the first arrival") {
  ProcessState state;
  UniformStream stream(7, 0);
  const double x1 = stream.next();
  const auto first = state.step(x1);
  CHECK(first.pre_min == 0.0);
  const auto second = state.step(stream.next());
  CHECK(second.pre_min == x1);
}

TEST_CASE("size never decreases and grows iff the arrival was below the min") {
  ProcessState state;
  UniformStream stream(99, 4);
  std::size_t previous = state.size();
  for (int k = 0; k < 5000; ++k) {
    const double x = stream.next();
    const double m = state.min();
    state.step(x);
    if (x < m) {
      CHECK(state.size() == previous + 1);
    } else {
      CHECK(state.size() == previous);
    }
    previous = state.size();
  }
}

TEST_CASE("a zero-step run yields a single record of the initial set") {
  RunConfig cfg;
  cfg.steps = 0;
  cfg.seed = 1;
  const auto records = run(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].n == 0);
  CHECK(records[0].s_total == 1);
  CHECK(records[0].min_value == 0.0);
}

TEST_CASE("the same config reproduces bit-identical records") {
  RunConfig cfg;
  cfg.steps = 20'000;
  cfg.seed = 314159;
  cfg.replicate_index = 2;
  cfg.thresholds = {0.25, 0.9};
  cfg.checkpoints = {0, 5000, 20'000};
  const auto a = run(cfg);
  const auto b = run(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].n == b[i].n);
    CHECK(a[i].s_total == b[i].s_total);
    CHECK(a[i].s_at == b[i].s_at);
    CHECK(a[i].W_at == b[i].W_at);
    CHECK(a[i].Z_at == b[i].Z_at);
    CHECK(a[i].X_at == b[i].X_at);
    CHECK(a[i].M_at == b[i].M_at);
    CHECK(a[i].E_at == b[i].E_at);
    CHECK(a[i].L == b[i].L);
    CHECK(a[i].R == b[i].R);
    CHECK(a[i].N == b[i].N);
    CHECK(a[i].min_value == b[i].min_value);
  }
}

TEST_CASE("final size equals one plus the below-minimum arrival count") {
  ProcessState state;
  UniformStream stream(2024, 0);
  std::int64_t below = 0;
  for (int k = 0; k < 10'000; ++k) {
    const double x = stream.next();
    if (x < state.min()) ++below;
    state.step(x);
  }
  CHECK(static_cast<std::int64_t>(state.size()) == 1 + below);
}

TEST_CASE("run_path consumes the stream in step order") {
  RunConfig cfg;
  cfg.steps = 257;
  cfg.seed = 5150;
  const auto records = run(cfg);
  // Mirror the contract by replaying the stream through a fresh state.
  ProcessState state;
  UniformStream stream(cfg.seed, cfg.replicate_index);
  for (std::uint64_t k = 0; k < cfg.steps; ++k) state.step(stream.next());
  REQUIRE(records.size() == 1);
  CHECK(records[0].s_total == static_cast<std::int64_t>(state.size()));
  CHECK(records[0].min_value == state.min());
}

TEST_CASE("config validation rejects bad inputs") {
  RunConfig cfg;
  cfg.steps = 10;
  SUBCASE("checkpoint beyond steps") {
    cfg.checkpoints = {11};
    CHECK_THROWS_AS((void)cfg.normalized(), std::invalid_argument);
  }
  SUBCASE("threshold outside (0,1)") {
    cfg.thresholds = {1.0};
    CHECK_THROWS_AS((void)cfg.normalized(), std::invalid_argument);
  }
  SUBCASE("initial element outside [0,1)") {
    cfg.initial_set = {1.0};
    CHECK_THROWS_AS((void)cfg.normalized(), std::invalid_argument);
  }
  SUBCASE("the critical threshold is always tracked") {
    const auto normalized = cfg.normalized();
    CHECK(std::count(normalized.thresholds.begin(),
                     normalized.thresholds.end(),
                     forgetting::theory::kZ0) == 1);
  }
}

// Containment under a shared stream: an enlarged start can never lose
// elements relative to the lean start, and the count gap at any level never
// exceeds the number of extra elements.
TEST_CASE("coupled runs preserve containment and the size gap") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    UniformStream setup(771, 1000 + trial);
    std::vector<double> extra = {setup.next(), setup.next()};
    ProcessState lean(std::vector<double>{0.0});
    ProcessState fat(std::vector<double>{0.0, extra[0], extra[1]});
    UniformStream arrivals(771, trial);
    for (int k = 1; k <= 2000; ++k) {
      const double x = arrivals.next();
      lean.step(x);
      fat.step(x);
      const auto gap = static_cast<std::int64_t>(fat.size()) -
                       static_cast<std::int64_t>(lean.size());
      REQUIRE(gap >= 0);
      REQUIRE(gap <= 2);
      if (k % 500 == 0) {
        const auto small = lean.sorted_elements();
        const auto big = fat.sorted_elements();
        std::size_t j = 0;
        bool contained = true;
        for (double v : small) {
          while (j < big.size() && big[j] < v) ++j;
          if (j == big.size() || big[j] != v) {
            contained = false;
            break;
          }
          ++j;
        }
        REQUIRE(contained);
      }
    }
  }
}

// Changing a single arrival moves any level count by at most 2.
TEST_CASE("perturbing one arrival is 2-Lipschitz in every count") {
  const std::vector<double> levels = {0.25, forgetting::theory::kZ0, 0.9};
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    UniformStream arrivals(4242, trial);
    std::vector<double> xs(3000);
    for (auto& x : xs) x = arrivals.next();
    UniformStream perturb(4242, 1000 + trial);
    std::vector<double> ys = xs;
    ys[static_cast<std::size_t>(perturb.next() * xs.size())] = perturb.next();

    ProcessState a;
    ProcessState b;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      a.step(xs[k]);
      b.step(ys[k]);
      const auto ae = a.sorted_elements();
      const auto be = b.sorted_elements();
      for (double z : levels) {
        const auto ca = std::lower_bound(ae.begin(), ae.end(), z) - ae.begin();
        const auto cb = std::lower_bound(be.begin(), be.end(), z) - be.begin();
        REQUIRE(std::abs(ca - cb) <= 2);
      }
      REQUIRE(std::abs(static_cast<std::int64_t>(a.size()) -
                       static_cast<std::int64_t>(b.size())) <= 2);
    }
  }
}

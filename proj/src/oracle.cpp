#include "forgetting/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "forgetting/rng.hpp"
#include "forgetting/theory.hpp"

namespace forgetting {

namespace {

// Sorted-vector state plus full histories; everything below is linear scans
// and binary searches, no incremental accumulators.
struct NaiveState {
  std::vector<double> elems;  // ascending
  std::vector<double> arrivals;
  std::vector<double> minima;                // pre-step minimum per step
  std::vector<double> initial_ge_z0;         // unmatched initial elements
  std::int64_t evicted_arrivals_ge_z0 = 0;   // the R convention

  std::int64_t count_below(double z) const {
    return std::lower_bound(elems.begin(), elems.end(), z) - elems.begin();
  }

  double sum_weight_below(double z) const {
    double sum = 0.0;
    for (double x : elems) {
      if (x >= z) break;
      sum += 1.0 / (1.0 - x);
    }
    return sum;
  }
};

ObservableRecord naive_snapshot(const NaiveState& st,
                                const std::vector<double>& thresholds,
                                std::size_t z0_index,
                                const std::vector<double>& z_replay,
                                std::uint64_t n) {
  ObservableRecord rec;
  rec.n = n;
  rec.s_total = static_cast<std::int64_t>(st.elems.size());
  const std::size_t count = thresholds.size();
  rec.s_at.resize(count);
  rec.W_at.resize(count);
  rec.Z_at.resize(count);
  rec.X_at.resize(count);
  rec.M_at.resize(count);
  rec.E_at.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = thresholds[i];
    rec.s_at[i] = st.count_below(z);
    rec.W_at[i] = st.sum_weight_below(z);
    rec.Z_at[i] = z_replay[i];
    rec.X_at[i] = rec.W_at[i] - rec.Z_at[i];
    rec.M_at[i] = std::count_if(st.minima.begin(), st.minima.end(),
                                [z](double m) { return m >= z; });
    rec.E_at[i] = std::count_if(st.arrivals.begin(), st.arrivals.end(),
                                [z](double x) { return x >= z; });
  }
  rec.L = rec.s_at[z0_index];
  rec.R = st.evicted_arrivals_ge_z0;
  rec.N = rec.X_at[z0_index] +
          std::numbers::e * static_cast<double>(rec.E_at[z0_index]) -
          static_cast<double>(n);
  rec.min_value = st.elems.empty()
                      ? std::numeric_limits<double>::quiet_NaN()
                      : st.elems.front();
  return rec;
}

}  // namespace

std::vector<ObservableRecord> oracle_run(const RunConfig& config) {
  const RunConfig cfg = config.normalized();
  const auto& thresholds = cfg.thresholds;
  const std::size_t z0_index = static_cast<std::size_t>(
      std::lower_bound(thresholds.begin(), thresholds.end(), theory::kZ0) -
      thresholds.begin());
  const double z0 = thresholds[z0_index];

  NaiveState st;
  st.elems = cfg.initial_set;
  std::sort(st.elems.begin(), st.elems.end());
  for (double x : st.elems) {
    if (x >= z0) st.initial_ge_z0.push_back(x);
  }

  // Replay of the restart compensator: when the count below z was zero
  // before the step, add the post-step weight sum below z.
  std::vector<double> z_replay(thresholds.size(), 0.0);

  std::vector<ObservableRecord> records;
  records.reserve(cfg.checkpoints.size());
  auto next_checkpoint = cfg.checkpoints.begin();
  if (next_checkpoint != cfg.checkpoints.end() && *next_checkpoint == 0) {
    records.push_back(
        naive_snapshot(st, thresholds, z0_index, z_replay, 0));
    ++next_checkpoint;
  }

  UniformStream stream(cfg.seed, cfg.replicate_index);
  std::vector<char> was_empty(thresholds.size());
  for (std::uint64_t k = 1; k <= cfg.steps; ++k) {
    const double x = stream.next();
    st.arrivals.push_back(x);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      was_empty[i] = st.count_below(thresholds[i]) == 0;
    }
    if (!st.elems.empty()) {
      const double m = st.elems.front();
      st.minima.push_back(m);
      if (x > m) {
        st.elems.erase(st.elems.begin());
        if (m >= z0) {
          const auto match = std::lower_bound(st.initial_ge_z0.begin(),
                                              st.initial_ge_z0.end(), m);
          if (match != st.initial_ge_z0.end() && *match == m) {
            st.initial_ge_z0.erase(match);
          } else {
            ++st.evicted_arrivals_ge_z0;
          }
        }
      }
    }
    st.elems.insert(std::upper_bound(st.elems.begin(), st.elems.end(), x), x);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (was_empty[i]) {
        z_replay[i] += st.sum_weight_below(thresholds[i]);
      }
    }
    if (next_checkpoint != cfg.checkpoints.end() && k == *next_checkpoint) {
      records.push_back(
          naive_snapshot(st, thresholds, z0_index, z_replay, k));
      ++next_checkpoint;
    }
  }
  return records;
}

std::vector<std::vector<double>> drifted_max_samples(
    const std::vector<double>& drifts, std::size_t paths, std::size_t steps,
    std::uint64_t seed, unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);

  std::vector<std::vector<double>> samples(drifts.size(),
                                           std::vector<double>(paths));
  std::atomic<std::size_t> next_path{0};
  auto worker = [&] {
    std::vector<double> maxima(drifts.size());
    std::vector<double> level(drifts.size());
    for (;;) {
      const std::size_t p = next_path.fetch_add(1);
      if (p >= paths) break;
      // One uniform stream per path feeds both the Gaussian increments and
      // the bridge draws, so results do not depend on the worker count.
      UniformStream uniforms(seed, p);
      double b = 0.0;
      std::fill(maxima.begin(), maxima.end(), 0.0);  // value at s=0
      std::fill(level.begin(), level.end(), 0.0);
      for (std::size_t i = 1; i <= steps; ++i) {
        const double u1 = uniforms.next();
        const double u2 = uniforms.next();
        const double increment =
            sqrt_dt * std::sqrt(-2.0 * std::log(u1)) *
            std::cos(2.0 * std::numbers::pi * u2);
        b += increment;
        // Within each grid cell the path conditioned on its endpoints is a
        // Brownian bridge (adding a linear drift does not change that), and
        // the cell maximum given endpoints (a,b) has the closed form below.
        // Sampling it removes the downward bias of a piecewise-linear grid
        // maximum entirely; the grid only sets the resolution of the
        // endpoint skeleton.
        const double bridge_term = -2.0 * dt * std::log(uniforms.next());
        const double s = static_cast<double>(i) * dt;
        for (std::size_t d = 0; d < drifts.size(); ++d) {
          const double start = level[d];
          const double end = b + drifts[d] * s;
          const double gap = end - start;
          const double cell_max =
              0.5 * (start + end + std::sqrt(gap * gap + bridge_term));
          if (cell_max > maxima[d]) maxima[d] = cell_max;
          level[d] = end;
        }
      }
      for (std::size_t d = 0; d < drifts.size(); ++d) {
        samples[d][p] = maxima[d];
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (auto& per_drift : samples) {
    std::sort(per_drift.begin(), per_drift.end());
  }
  return samples;
}

}  // namespace forgetting

#include "forgetting/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace forgetting {

RunningMoments moments(const std::vector<double>& samples) {
  RunningMoments out;
  for (double x : samples) out.add(x);
  return out;
}

double empirical_cdf(const std::vector<double>& sorted_samples, double x) {
  const auto it =
      std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
  return static_cast<double>(it - sorted_samples.begin()) /
         static_cast<double>(sorted_samples.size());
}

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("covariance: mismatched sample sizes");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("covariance: need at least two pairs");
  }
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cross = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cross += (a[i] - mean_a) * (b[i] - mean_b);
  }
  return cross / (n - 1.0);
}

double increment_covariance(const std::vector<double>& at_t1,
                            const std::vector<double>& at_t2) {
  if (at_t1.size() != at_t2.size()) {
    throw std::invalid_argument(
        "increment_covariance: checkpoints cover different replicates");
  }
  std::vector<double> increments(at_t1.size());
  for (std::size_t i = 0; i < at_t1.size(); ++i) {
    increments[i] = at_t2[i] - at_t1[i];
  }
  return covariance(at_t1, increments);
}

void EnsembleSummary::merge(const EnsembleSummary& other) {
  if (replicates == 0) {
    *this = other;
    return;
  }
  if (other.replicates == 0) return;
  if (n_steps != other.n_steps ||
      per_checkpoint.size() != other.per_checkpoint.size()) {
    throw std::invalid_argument("merge: summaries from different plans");
  }
  replicates += other.replicates;
  for (std::size_t i = 0; i < per_checkpoint.size(); ++i) {
    auto& mine = per_checkpoint[i];
    const auto& theirs = other.per_checkpoint[i];
    if (mine.n != theirs.n) {
      throw std::invalid_argument("merge: checkpoint grids differ");
    }
    for (const auto& [name, stat] : theirs.scalars) {
      mine.scalars[name].merge(stat);
    }
  }
  for (const auto& [name, values] : other.pools) {
    auto& pool = pools[name];
    pool.insert(pool.end(), values.begin(), values.end());
  }
  sandwich_violations += other.sandwich_violations;
  r_growth_violations += other.r_growth_violations;
}

}  // namespace forgetting

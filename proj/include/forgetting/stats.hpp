#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace forgetting {

// Single-pass mean/variance accumulator (Welford), mergeable without loss
// of the streaming guarantees. Sample variance uses the n-1 denominator and
// is NaN for fewer than two observations.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
  }

  void merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double delta = other.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += other.m2 + delta * delta * na * nb / total;
    count += other.count;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
  }

  double variance() const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    return m2 / static_cast<double>(count - 1);
  }
};

// Whole-sample convenience wrapper.
RunningMoments moments(const std::vector<double>& samples);

// One-sample Kolmogorov-Smirnov distance between the empirical distribution
// of `samples` and the reference CDF: sup over the sorted sample of
// max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|). Throws on an empty sample.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    sup = std::max({sup, hi, lo});
  }
  return sup;
}

// Value of the empirical CDF of a sorted sample at x (proportion <= x).
double empirical_cdf(const std::vector<double>& sorted_samples, double x);

// Sample covariance (n-1 denominator) of two aligned vectors. Throws on
// mismatched lengths or fewer than two pairs.
double covariance(const std::vector<double>& a, const std::vector<double>& b);

// Sample covariance between the level at the first checkpoint and the
// increment to the second, for per-replicate path values aligned by index.
double increment_covariance(const std::vector<double>& at_t1,
                            const std::vector<double>& at_t2);

// Per-checkpoint scalar statistics over an ensemble.
struct CheckpointStats {
  std::uint64_t n = 0;
  std::map<std::string, RunningMoments> scalars;
};

// Mergeable aggregate over replicates. Pools hold one value per replicate in
// replicate-index order; merging concatenates, so summaries must be merged
// in index order (run_ensemble does).
struct EnsembleSummary {
  std::uint64_t n_steps = 0;
  std::uint64_t replicates = 0;
  std::vector<CheckpointStats> per_checkpoint;
  std::map<std::string, std::vector<double>> pools;
  std::uint64_t sandwich_violations = 0;
  std::uint64_t r_growth_violations = 0;

  void merge(const EnsembleSummary& other);
};

}  // namespace forgetting

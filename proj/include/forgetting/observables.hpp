#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "forgetting/engine.hpp"

namespace forgetting {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void reset() {
    sum_ = 0.0;
    comp_ = 0.0;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Snapshot of every tracked statistic at one step index. The per-threshold
// vectors are aligned with the tracker's sorted threshold list.
//
// Conventions (fixed here, asserted in tests):
//  * s_at[z] counts elements strictly below z.
//  * L is the count of retained elements below the critical threshold
//    z0 = 1-1/e, i.e. s_at[z0].
//  * R counts arrivals >= z0 that have been evicted; evictions matching a
//    still-unconsumed initial element >= z0 are attributed to the initial
//    set and excluded from R.
//  * X_at[z] equals W_at[z] - Z_at[z] bit-exactly.
//  * min_value is NaN only when the set is empty (empty start, n = 0).
struct ObservableRecord {
  std::uint64_t n = 0;
  std::int64_t s_total = 0;
  std::vector<std::int64_t> s_at;
  std::vector<double> W_at;
  std::vector<double> Z_at;
  std::vector<double> X_at;
  std::vector<std::int64_t> M_at;
  std::vector<std::int64_t> E_at;
  std::int64_t L = 0;
  std::int64_t R = 0;
  double N = 0.0;
  double min_value = 0.0;
};

// Exact recomputation of the branching weight sum(1/(1-x)) over elements
// x < z, by scanning the container. Audit reference for the incremental
// accumulators; z may be any value including 1.
double recompute_W(const ProcessState& state, double z);

// Incrementally maintained statistics for one run. Updates are O(#thresholds)
// per step and never inspect the element container except in reset(),
// snapshot() and audit().
//
// Maintained per threshold z: s(z,n), W(z,n), the restart compensator Z(z,n)
// (weight injected at steps whose pre-step count below z was zero), the
// running minimum of X = W - Z, M(z,n) = #{k<=n : pre-step min >= z} and
// E(z,n) = #{k<=n : arrival >= z}. Globally: size, L, R, and the centered
// size martingale N = X(z0,n) + e*E(z0,n) - n.
class ObservableSet {
 public:
  // `thresholds` must be sorted, deduplicated, inside (0,1) and contain the
  // critical threshold (RunConfig::normalized() guarantees this).
  explicit ObservableSet(std::vector<double> thresholds,
                         bool audit_checkpoints = true);

  // Re-seeds all statistics from the given state. Elements >= z0 present
  // here are treated as initial elements for the R attribution convention.
  void reset(const ProcessState& state);

  void on_step(const StepEffect& effect);

  // Builds a record from the maintained counters; `state` supplies only the
  // current minimum (and the audit reference when auditing is enabled).
  ObservableRecord snapshot(const ProcessState& state);

  // Compares every W accumulator against recompute_W. Returns the worst
  // relative discrepancy and throws std::logic_error beyond 1e-9*(1+W).
  double audit(const ProcessState& state);

  const std::vector<double>& thresholds() const { return thresholds_; }
  std::size_t z0_index() const { return z0_index_; }
  std::uint64_t n() const { return n_; }
  std::int64_t size_count() const { return s_total_; }
  // Current counts below each threshold, aligned with thresholds().
  const std::vector<std::int64_t>& counts_below() const { return s_; }

  // Invariant-violation counters, checked once per step:
  //  * sandwich: 0 <= Z + min_k X <= 1/(1-z) for every tracked z;
  //  * r_growth: R may only grow at a step whose pre-step L was zero.
  std::uint64_t sandwich_violations() const { return sandwich_violations_; }
  std::uint64_t r_growth_violations() const { return r_growth_violations_; }
  double worst_audit_error() const { return worst_audit_error_; }

 private:
  std::vector<double> thresholds_;
  std::vector<double> weight_bound_;    // 1/(1-z) per threshold
  std::vector<double> sandwich_bound_;  // max(1/(1-z), initial W)
  std::size_t z0_index_ = 0;
  bool audit_checkpoints_ = true;

  std::uint64_t n_ = 0;
  std::int64_t s_total_ = 0;
  std::vector<std::int64_t> s_;
  std::vector<CompensatedSum> w_;
  std::vector<CompensatedSum> z_;
  std::vector<double> x_min_;
  std::vector<std::int64_t> m_;
  std::vector<std::int64_t> e_;
  std::int64_t r_ = 0;
  std::vector<double> initial_ge_z0_;  // not yet matched by an eviction

  std::uint64_t sandwich_violations_ = 0;
  std::uint64_t r_growth_violations_ = 0;
  double worst_audit_error_ = 0.0;
};

}  // namespace forgetting

#include "forgetting/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "forgetting/theory.hpp"

namespace forgetting {

namespace {
constexpr double kAuditRelTol = 1e-9;
// Slack for the per-step sandwich comparison; the maintained quantities are
// floats, the invariant is exact in real arithmetic.
constexpr double kSandwichRelSlack = 1e-12;

inline double weight(double x) { return 1.0 / (1.0 - x); }
}  // namespace

double recompute_W(const ProcessState& state, double z) {
  double sum = 0.0;
  for (double x : state.elements()) {
    if (x < z) sum += weight(x);
  }
  return sum;
}

ObservableSet::ObservableSet(std::vector<double> thresholds,
                             bool audit_checkpoints)
    : thresholds_(std::move(thresholds)),
      audit_checkpoints_(audit_checkpoints) {
  if (thresholds_.empty() ||
      !std::is_sorted(thresholds_.begin(), thresholds_.end())) {
    throw std::invalid_argument("thresholds must be sorted and nonempty");
  }
  const auto z0_it =
      std::lower_bound(thresholds_.begin(), thresholds_.end(), theory::kZ0);
  if (z0_it == thresholds_.end() || *z0_it != theory::kZ0) {
    throw std::invalid_argument("threshold list must contain 1-1/e");
  }
  z0_index_ = static_cast<std::size_t>(z0_it - thresholds_.begin());
  weight_bound_.reserve(thresholds_.size());
  for (double z : thresholds_) weight_bound_.push_back(weight(z));

  const std::size_t count = thresholds_.size();
  s_.assign(count, 0);
  w_.assign(count, {});
  z_.assign(count, {});
  x_min_.assign(count, 0.0);
  m_.assign(count, 0);
  e_.assign(count, 0);
}

void ObservableSet::reset(const ProcessState& state) {
  const std::size_t count = thresholds_.size();
  n_ = state.step_count();
  s_total_ = static_cast<std::int64_t>(state.size());
  s_.assign(count, 0);
  w_.assign(count, {});
  z_.assign(count, {});
  m_.assign(count, 0);
  e_.assign(count, 0);
  r_ = 0;
  initial_ge_z0_.clear();
  sandwich_violations_ = 0;
  r_growth_violations_ = 0;
  worst_audit_error_ = 0.0;

  const double z0 = thresholds_[z0_index_];
  for (double x : state.elements()) {
    const auto first_above =
        std::upper_bound(thresholds_.begin(), thresholds_.end(), x);
    for (auto it = first_above; it != thresholds_.end(); ++it) {
      const auto i = static_cast<std::size_t>(it - thresholds_.begin());
      ++s_[i];
      w_[i].add(weight(x));
    }
    if (x >= z0) initial_ge_z0_.push_back(x);
  }
  std::sort(initial_ge_z0_.begin(), initial_ge_z0_.end());
  sandwich_bound_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    x_min_[i] = w_[i].value();
    // For the default start {0} the initial weight is 1 and this is just
    // 1/(1-z); a heavier initial set raises the bound to its starting weight.
    sandwich_bound_[i] = std::max(weight_bound_[i], x_min_[i]);
  }
}

void ObservableSet::on_step(const StepEffect& effect) {
  const std::size_t count = thresholds_.size();
  const double x = effect.inserted;
  const double z0 = thresholds_[z0_index_];
  const std::int64_t pre_l = s_[z0_index_];
  ++n_;

  // Occupation and arrival counters: prefix of thresholds <= the value.
  if (effect.pre_min) {
    const std::size_t stop = static_cast<std::size_t>(
        std::upper_bound(thresholds_.begin(), thresholds_.end(),
                         *effect.pre_min) -
        thresholds_.begin());
    for (std::size_t i = 0; i < stop; ++i) ++m_[i];
  }
  const std::size_t insert_from = static_cast<std::size_t>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), x) -
      thresholds_.begin());
  for (std::size_t i = 0; i < insert_from; ++i) ++e_[i];

  // Restart compensation: a threshold whose pre-step count was zero and
  // whose count the arrival now raises receives the arrival's weight. The
  // indicator uses the exact integer count; no eviction can touch such a
  // threshold in the same step (any element below it would contradict the
  // zero count).
  for (std::size_t i = insert_from; i < count; ++i) {
    if (s_[i] == 0) z_[i].add(weight(x));
  }

  if (effect.evicted) {
    const double gone = *effect.evicted;
    const std::size_t evict_from = static_cast<std::size_t>(
        std::upper_bound(thresholds_.begin(), thresholds_.end(), gone) -
        thresholds_.begin());
    const double gone_weight = weight(gone);
    for (std::size_t i = evict_from; i < count; ++i) {
      --s_[i];
      w_[i].add(-gone_weight);
      // Re-pin the accumulator whenever the set below z empties; the true
      // sum is exactly zero there.
      if (s_[i] == 0) w_[i].reset();
    }
    if (gone >= z0) {
      const auto match = std::lower_bound(initial_ge_z0_.begin(),
                                          initial_ge_z0_.end(), gone);
      if (match != initial_ge_z0_.end() && *match == gone) {
        initial_ge_z0_.erase(match);
      } else {
        if (pre_l > 0) ++r_growth_violations_;
        ++r_;
      }
    }
  } else {
    ++s_total_;
  }

  const double inserted_weight = weight(x);
  for (std::size_t i = insert_from; i < count; ++i) {
    ++s_[i];
    w_[i].add(inserted_weight);
  }

  // Running minimum of X = W - Z and the sandwich invariant
  // 0 <= Z + min X <= max(1/(1-z), initial W).
  for (std::size_t i = 0; i < count; ++i) {
    const double zv = z_[i].value();
    const double xv = w_[i].value() - zv;
    if (xv < x_min_[i]) x_min_[i] = xv;
    const double bound = sandwich_bound_[i];
    const double slack = kSandwichRelSlack * (1.0 + zv + bound);
    const double pinched = zv + x_min_[i];
    if (pinched < -slack || pinched > bound + slack) ++sandwich_violations_;
  }
}

ObservableRecord ObservableSet::snapshot(const ProcessState& state) {
  const std::size_t count = thresholds_.size();
  ObservableRecord rec;
  rec.n = n_;
  rec.s_total = s_total_;
  rec.s_at = s_;
  rec.M_at = m_;
  rec.E_at = e_;
  rec.W_at.resize(count);
  rec.Z_at.resize(count);
  rec.X_at.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    rec.W_at[i] = w_[i].value();
    rec.Z_at[i] = z_[i].value();
    rec.X_at[i] = rec.W_at[i] - rec.Z_at[i];
  }
  rec.L = s_[z0_index_];
  rec.R = r_;
  rec.N = rec.X_at[z0_index_] + std::numbers::e *
              static_cast<double>(e_[z0_index_]) -
          static_cast<double>(n_);
  rec.min_value = state.min_or_nan();
  if (audit_checkpoints_) audit(state);
  return rec;
}

double ObservableSet::audit(const ProcessState& state) {
  double worst = 0.0;
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    const double ref = recompute_W(state, thresholds_[i]);
    const double err = std::abs(w_[i].value() - ref);
    const double scale = 1.0 + ref;
    worst = std::max(worst, err / scale);
    if (err > kAuditRelTol * scale) {
      throw std::logic_error(
          "branching-weight accumulator diverged from direct recomputation "
          "at z=" +
          std::to_string(thresholds_[i]) + ": " +
          std::to_string(w_[i].value()) + " vs " + std::to_string(ref));
    }
  }
  worst_audit_error_ = std::max(worst_audit_error_, worst);
  return worst;
}

}  // namespace forgetting

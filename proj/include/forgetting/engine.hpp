#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace forgetting {

class ObservableSet;
struct ObservableRecord;

// What a single insertion did, as reported to observers. `pre_min` is the
// minimum just before the arrival entered (empty when the set was empty);
// `evicted` is set when that minimum left.
struct StepEffect {
  double inserted = 0.0;
  std::optional<double> evicted;
  std::optional<double> pre_min;
};

// The evolving memory multiset. Arrivals join one by one; an arrival strictly
// larger than the current minimum evicts that minimum, so the size never
// decreases. Minimum tracking uses a binary min-heap: O(log n) per step.
// Ordering rule: an arrival exactly equal to the minimum does NOT evict.
class ProcessState {
 public:
  ProcessState() : ProcessState(std::vector<double>{0.0}) {}
  explicit ProcessState(std::vector<double> initial);

  // Inserts x, applying the eviction rule, and reports the effect.
  StepEffect step(double x);

  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  std::uint64_t step_count() const { return step_count_; }

  // Smallest element; only valid when nonempty.
  double min() const { return heap_.front(); }
  // NaN when empty (only possible before any step with an empty start).
  double min_or_nan() const;

  // Elements in unspecified (heap) order.
  std::span<const double> elements() const { return heap_; }
  std::vector<double> sorted_elements() const;

 private:
  std::vector<double> heap_;  // min-heap via std::greater
  std::uint64_t step_count_ = 0;
};

// A single run: `steps` arrivals drawn from the stream (seed, replicate_index),
// with observable snapshots emitted at the given step indices.
struct RunConfig {
  std::uint64_t steps = 0;
  std::vector<double> initial_set = {0.0};
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
  std::vector<double> thresholds;          // tracked levels in (0,1)
  std::vector<std::uint64_t> checkpoints;  // snapshot step indices, <= steps

  // Returns a validated copy: thresholds sorted/deduped with the critical
  // threshold 1-1/e always present, checkpoints sorted/deduped (default:
  // {steps} when empty). Throws std::invalid_argument on out-of-range values
  // or a checkpoint beyond steps.
  RunConfig normalized() const;
};

// Runs the process for config.steps arrivals, feeding every step to
// `observers` and snapshotting at each checkpoint. Consumes exactly
// config.steps values from the stream, one per step, in order; this
// consumption pattern is part of the contract so that independent
// implementations can replay the identical run.
std::vector<ObservableRecord> run_path(const RunConfig& config,
                                       ObservableSet& observers);

}  // namespace forgetting

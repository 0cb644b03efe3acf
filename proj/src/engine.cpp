#include "forgetting/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "forgetting/observables.hpp"
#include "forgetting/rng.hpp"
#include "forgetting/theory.hpp"

namespace forgetting {

namespace {

void validate_unit_interval(const std::vector<double>& values,
                            const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  " must lie in [0,1): got " +
                                  std::to_string(v));
    }
  }
}

}  // namespace

ProcessState::ProcessState(std::vector<double> initial)
    : heap_(std::move(initial)) {
  validate_unit_interval(heap_, "initial element");
  std::make_heap(heap_.begin(), heap_.end(), std::greater<>{});
}

StepEffect ProcessState::step(double x) {
  StepEffect effect;
  effect.inserted = x;
  ++step_count_;
  if (!heap_.empty()) {
    const double m = heap_.front();
    effect.pre_min = m;
    if (x > m) {
      // Evict the minimum by replacing the root and sifting the arrival
      // down; one pass instead of a pop/push pair.
      const std::size_t count = heap_.size();
      std::size_t hole = 0;
      for (;;) {
        std::size_t child = 2 * hole + 1;
        if (child >= count) break;
        if (child + 1 < count && heap_[child + 1] < heap_[child]) ++child;
        if (heap_[child] < x) {
          heap_[hole] = heap_[child];
          hole = child;
        } else {
          break;
        }
      }
      heap_[hole] = x;
      effect.evicted = m;
      return effect;
    }
  }
  heap_.push_back(x);
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  return effect;
}

double ProcessState::min_or_nan() const {
  return heap_.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : heap_.front();
}

std::vector<double> ProcessState::sorted_elements() const {
  std::vector<double> out(heap_.begin(), heap_.end());
  std::sort(out.begin(), out.end());
  return out;
}

RunConfig RunConfig::normalized() const {
  RunConfig out = *this;
  validate_unit_interval(out.initial_set, "initial element");
  for (double z : out.thresholds) {
    if (!(z > 0.0 && z < 1.0)) {
      throw std::invalid_argument("threshold must lie strictly in (0,1): " +
                                  std::to_string(z));
    }
  }
  out.thresholds.push_back(theory::kZ0);
  std::sort(out.thresholds.begin(), out.thresholds.end());
  out.thresholds.erase(
      std::unique(out.thresholds.begin(), out.thresholds.end()),
      out.thresholds.end());

  if (out.checkpoints.empty()) {
    out.checkpoints.push_back(out.steps);
  }
  std::sort(out.checkpoints.begin(), out.checkpoints.end());
  out.checkpoints.erase(
      std::unique(out.checkpoints.begin(), out.checkpoints.end()),
      out.checkpoints.end());
  if (out.checkpoints.back() > out.steps) {
    throw std::invalid_argument(
        "checkpoint " + std::to_string(out.checkpoints.back()) +
        " beyond run length " + std::to_string(out.steps));
  }
  return out;
}

std::vector<ObservableRecord> run_path(const RunConfig& config,
                                       ObservableSet& observers) {
  const RunConfig cfg = config.normalized();
  ProcessState state(cfg.initial_set);
  observers.reset(state);

  std::vector<ObservableRecord> records;
  records.reserve(cfg.checkpoints.size());
  auto next_checkpoint = cfg.checkpoints.begin();
  if (next_checkpoint != cfg.checkpoints.end() && *next_checkpoint == 0) {
    records.push_back(observers.snapshot(state));
    ++next_checkpoint;
  }

  UniformStream stream(cfg.seed, cfg.replicate_index);
  for (std::uint64_t k = 1; k <= cfg.steps; ++k) {
    observers.on_step(state.step(stream.next()));
    if (next_checkpoint != cfg.checkpoints.end() && k == *next_checkpoint) {
      records.push_back(observers.snapshot(state));
      ++next_checkpoint;
    }
  }
  return records;
}

}  // namespace forgetting

#pragma once

#include <cstdint>
#include <vector>

#include "forgetting/engine.hpp"
#include "forgetting/observables.hpp"

namespace forgetting {

// Deliberately naive reference implementation of the same run: a plain
// sorted vector, full arrival and minimum histories, and every statistic
// recomputed from scratch at each checkpoint. Consumes the identical
// uniform stream as run_path (one draw per step, in order), so records are
// directly comparable. Intended for n up to ~1e5.
std::vector<ObservableRecord> oracle_run(const RunConfig& config);

// Monte Carlo reference for the drifted-maximum law: for each drift mu,
// sup_{s<=1}(B_s + mu*s) sampled on a uniform grid with `steps` Gaussian
// increments. Returns one sorted sample vector per drift, `paths` values
// each. A single set of Brownian paths is shared across all drifts;
// path i uses the normal stream (seed, i), so the result is independent
// of `jobs`.
std::vector<std::vector<double>> drifted_max_samples(
    const std::vector<double>& drifts, std::size_t paths, std::size_t steps,
    std::uint64_t seed, unsigned jobs = 0);

}  // namespace forgetting

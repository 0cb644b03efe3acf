#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forgetting/engine.hpp"
#include "forgetting/stats.hpp"

namespace forgetting {

// One scalar extracted per replicate into a named sample pool. Path scalars
// are normalized by sqrt(total steps), matching the scaling under which the
// limit laws are stated.
struct PoolSpec {
  enum class Kind {
    kSizeRaw,       // s(1,n) at the checkpoint
    kSizeCentered,  // (s(1,k) - k/e)/sqrt(n)
    kL,             // L_k/sqrt(n)
    kR,             // R_k/sqrt(n)
    kSymDiff,       // (L_k+R_k)/sqrt(n)
    kSAt,           // s(z,k)/sqrt(n) for a tracked threshold z
  };

  std::string name;
  Kind kind = Kind::kSizeCentered;
  double threshold = 0.0;        // kSAt: which tracked level
  std::uint64_t checkpoint = 0;  // must appear in base.checkpoints
};

// An ensemble of independent replicates of one run configuration. Replicate
// i always uses the uniform stream (base.seed, i), so results are a pure
// function of the plan regardless of worker count or scheduling.
struct ExperimentPlan {
  RunConfig base;
  std::uint64_t replicates = 1;
  std::vector<PoolSpec> pools;
  std::vector<std::string> targets;  // named verification targets, see verify
};

// Runs the plan with `jobs` workers (0 = hardware concurrency). Replicates
// are merged in index order; a failing replicate aborts the run with an
// error naming it, never a silent omission.
EnsembleSummary run_ensemble(const ExperimentPlan& plan, unsigned jobs = 0);

enum class CheckStatus { kPass, kFail, kSkippedScale };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string details;
  double seconds = 0.0;
};

struct VerifyReport {
  std::string suite;
  std::string scale;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

const char* to_string(CheckStatus status);

// Check names carried by each suite ("all", "oracle", "invariants",
// "distributional"). Throws std::invalid_argument for unknown suites.
std::vector<std::string> suite_targets(const std::string& suite);

// Runs the named checks at the given scale ("full" runs everything at its
// stated size; "quick" marks the heaviest ensembles skipped(scale) and is
// meant for CI). The report is deterministic: it depends only on the target
// list, the scale and the code itself.
VerifyReport verify_named(const std::vector<std::string>& targets,
                          const std::string& scale, unsigned jobs = 0);

VerifyReport verify(const std::string& suite, const std::string& scale,
                    unsigned jobs = 0);

}  // namespace forgetting

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "forgetting/montecarlo.hpp"
#include "forgetting/observables.hpp"

namespace forgetting::cli {

inline constexpr const char* kVersion = "0.1.0";

// Doubles are printed with 17 significant digits so parsing them back
// reproduces the exact bit pattern. Any NaN or infinity aborts the write.
std::string format_double(double v, const char* context);

// Trace CSV: header row then one row per (replicate, checkpoint) with the
// fixed column order
//   replicate,n,s_total,L,R,min_value,
//   then per threshold: s@z,W@z,Z@z,X@z,M@z,E@z,
//   then N.
void write_trace_header(std::ostream& out,
                        const std::vector<double>& thresholds);
void write_trace_row(std::ostream& out, std::uint64_t replicate,
                     const ObservableRecord& rec);

// Ensemble summary JSON with stable key order:
// {plan, per_checkpoint[], pools{}, ks_results[], version, seed}.
std::string summary_json(const ExperimentPlan& plan,
                         const EnsembleSummary& summary);

// Verification report JSON.
std::string report_json(const VerifyReport& report);

// One human-readable line per check, e.g.
// [PASS] c01-mean-size  measured=0.0002 tol=0.005  (1.2s)  mean ...
std::string report_line(const CheckResult& check);

struct SimulateOptions {
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<double> thresholds;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t checkpoint_every = 0;  // 0 = not used
  std::vector<double> initial = {0.0};
  std::string out;  // empty = stdout
};

struct EnsembleOptions {
  std::uint64_t steps = 0;
  std::uint64_t replicates = 1;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::vector<std::string> pools = {"L", "R", "symdiff", "size"};
  std::vector<double> thresholds;
  std::vector<std::uint64_t> checkpoints;
  std::string out;
};

struct VerifyOptions {
  std::string suite = "all";
  std::string scale = "full";
  unsigned jobs = 0;
  std::string out;
};

struct TheoryOptions {
  std::string grid;  // "a:b:step", default "0:3:0.05"
  std::string out;
};

int run_simulate(const SimulateOptions& options);
int run_ensemble_command(const EnsembleOptions& options);
int run_verify(const VerifyOptions& options);
int run_theory(const TheoryOptions& options);

// Pool names accepted by `ensemble --pools`: L, R, symdiff, size, size_raw,
// or s@<threshold>. Throws std::invalid_argument for anything else.
PoolSpec parse_pool(const std::string& name, std::uint64_t checkpoint);

}  // namespace forgetting::cli

#include "forgetting/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "forgetting/theory.hpp"
#include "json.hpp"

namespace forgetting::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

void ensure_finite(double v, const char* context) {
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("refusing to emit non-finite value in ") +
                             context);
  }
}

// Writes either to the named file or to stdout, with an explicit error when
// the file cannot be created.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) : path_(path) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) {
        throw std::runtime_error("cannot open output file: " + path_);
      }
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void finish() {
    if (!path_.empty()) {
      file_.flush();
      if (!file_) {
        throw std::runtime_error("failed writing output file: " + path_);
      }
    }
  }

 private:
  std::string path_;
  std::ofstream file_;
};

ordered_json moments_json(const RunningMoments& m) {
  ordered_json j;
  j["count"] = m.count;
  j["mean"] = m.mean;
  j["variance"] = m.count < 2 ? ordered_json(nullptr)
                              : ordered_json(m.variance());
  j["min"] = m.min;
  j["max"] = m.max;
  return j;
}

const char* pool_kind_name(PoolSpec::Kind kind) {
  switch (kind) {
    case PoolSpec::Kind::kSizeRaw:
      return "size_raw";
    case PoolSpec::Kind::kSizeCentered:
      return "size_centered";
    case PoolSpec::Kind::kL:
      return "L";
    case PoolSpec::Kind::kR:
      return "R";
    case PoolSpec::Kind::kSymDiff:
      return "symdiff";
    case PoolSpec::Kind::kSAt:
      return "s_at";
  }
  return "unknown";
}

}  // namespace

std::string format_double(double v, const char* context) {
  ensure_finite(v, context);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_header(std::ostream& out,
                        const std::vector<double>& thresholds) {
  out << "replicate,n,s_total,L,R,min_value";
  for (double z : thresholds) {
    const std::string key = format_double(z, "trace header");
    out << ",s@" << key << ",W@" << key << ",Z@" << key << ",X@" << key
        << ",M@" << key << ",E@" << key;
  }
  out << ",N\n";
}

void write_trace_row(std::ostream& out, std::uint64_t replicate,
                     const ObservableRecord& rec) {
  out << replicate << ',' << rec.n << ',' << rec.s_total << ',' << rec.L
      << ',' << rec.R << ',' << format_double(rec.min_value, "trace row");
  for (std::size_t t = 0; t < rec.s_at.size(); ++t) {
    out << ',' << rec.s_at[t] << ','
        << format_double(rec.W_at[t], "trace row") << ','
        << format_double(rec.Z_at[t], "trace row") << ','
        << format_double(rec.X_at[t], "trace row") << ',' << rec.M_at[t]
        << ',' << rec.E_at[t];
  }
  out << ',' << format_double(rec.N, "trace row") << '\n';
}

std::string summary_json(const ExperimentPlan& plan,
                         const EnsembleSummary& summary) {
  const RunConfig base = plan.base.normalized();
  ordered_json j;
  ordered_json plan_json;
  plan_json["steps"] = base.steps;
  plan_json["replicates"] = plan.replicates;
  plan_json["initial_set"] = base.initial_set;
  plan_json["thresholds"] = base.thresholds;
  plan_json["checkpoints"] = base.checkpoints;
  ordered_json pool_specs = ordered_json::array();
  for (const PoolSpec& p : plan.pools) {
    ordered_json spec;
    spec["name"] = p.name;
    spec["kind"] = pool_kind_name(p.kind);
    if (p.kind == PoolSpec::Kind::kSAt) spec["threshold"] = p.threshold;
    spec["checkpoint"] = p.checkpoint;
    pool_specs.push_back(spec);
  }
  plan_json["pools"] = pool_specs;
  j["plan"] = plan_json;

  ordered_json checkpoints = ordered_json::array();
  for (const CheckpointStats& cp : summary.per_checkpoint) {
    ordered_json c;
    c["n"] = cp.n;
    ordered_json scalars;
    for (const auto& [name, m] : cp.scalars) {
      for (double v : {m.mean, m.min, m.max}) {
        ensure_finite(v, "summary scalars");
      }
      scalars[name] = moments_json(m);
    }
    c["scalars"] = scalars;
    checkpoints.push_back(c);
  }
  j["per_checkpoint"] = checkpoints;

  ordered_json pools;
  for (const auto& [name, values] : summary.pools) {
    for (double v : values) ensure_finite(v, "summary pools");
    pools[name] = values;
  }
  j["pools"] = pools;

  // Pools whose limit law is known get an informational KS distance.
  ordered_json ks_results = ordered_json::array();
  const double sqrt_n =
      std::sqrt(static_cast<double>(std::max<std::uint64_t>(base.steps, 1)));
  for (const PoolSpec& p : plan.pools) {
    const auto values = summary.pools.find(p.name);
    if (values == summary.pools.end() || values->second.empty()) continue;
    std::string reference;
    double ks = -1.0;
    switch (p.kind) {
      case PoolSpec::Kind::kL:
      case PoolSpec::Kind::kR:
        reference = "half_normal_sqrt2_over_e";
        ks = ks_statistic(values->second, theory::half_normal_scaled_cdf);
        break;
      case PoolSpec::Kind::kSymDiff:
        reference = "symdiff_limit";
        ks = ks_statistic(values->second, theory::symdiff_limit_cdf);
        break;
      case PoolSpec::Kind::kSizeCentered:
        reference = "normal_clt_coeff";
        ks = ks_statistic(values->second, [](double x) {
          return theory::normal_cdf(x / theory::kCltCoeff);
        });
        break;
      case PoolSpec::Kind::kSAt: {
        reference = "drifted_max";
        const double mu = (p.threshold - theory::kZ0) * sqrt_n *
                          std::numbers::e / std::numbers::sqrt2;
        ks = ks_statistic(values->second, [mu](double x) {
          return theory::drifted_max_cdf(
              x * std::numbers::e / std::numbers::sqrt2, mu);
        });
        break;
      }
      case PoolSpec::Kind::kSizeRaw:
        break;
    }
    if (ks >= 0.0) {
      ordered_json entry;
      entry["pool"] = p.name;
      entry["reference"] = reference;
      entry["samples"] = values->second.size();
      entry["statistic"] = ks;
      ks_results.push_back(entry);
    }
  }
  j["ks_results"] = ks_results;

  j["version"] = kVersion;
  j["seed"] = base.seed;
  return j.dump(2);
}

std::string report_json(const VerifyReport& report) {
  ordered_json j;
  j["version"] = kVersion;
  j["suite"] = report.suite;
  j["scale"] = report.scale;
  j["seed"] = report.seed;
  j["passed"] = report.all_passed();
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : report.checks) {
    ordered_json entry;
    entry["name"] = c.name;
    entry["status"] = to_string(c.status);
    entry["measured"] = c.measured;
    entry["tolerance"] = c.tolerance;
    entry["details"] = c.details;
    entry["seconds"] = c.seconds;
    checks.push_back(entry);
  }
  j["checks"] = checks;
  return j.dump(2);
}

std::string report_line(const CheckResult& check) {
  std::ostringstream out;
  switch (check.status) {
    case CheckStatus::kPass:
      out << "[PASS] ";
      break;
    case CheckStatus::kFail:
      out << "[FAIL] ";
      break;
    case CheckStatus::kSkippedScale:
      out << "[SKIP] ";
      break;
  }
  out << check.name;
  if (check.status != CheckStatus::kSkippedScale) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  measured=%.6g tol=%.6g  (%.1fs)",
                  check.measured, check.tolerance, check.seconds);
    out << buf;
  }
  if (!check.details.empty()) out << "  " << check.details;
  return out.str();
}

PoolSpec parse_pool(const std::string& name, std::uint64_t checkpoint) {
  PoolSpec pool;
  pool.name = name;
  pool.checkpoint = checkpoint;
  if (name == "L") {
    pool.kind = PoolSpec::Kind::kL;
  } else if (name == "R") {
    pool.kind = PoolSpec::Kind::kR;
  } else if (name == "symdiff") {
    pool.kind = PoolSpec::Kind::kSymDiff;
  } else if (name == "size") {
    pool.kind = PoolSpec::Kind::kSizeCentered;
  } else if (name == "size_raw") {
    pool.kind = PoolSpec::Kind::kSizeRaw;
  } else if (name.rfind("s@", 0) == 0) {
    pool.kind = PoolSpec::Kind::kSAt;
    try {
      pool.threshold = std::stod(name.substr(2));
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse pool threshold in '" + name +
                                  "'");
    }
  } else {
    throw std::invalid_argument(
        "unknown pool '" + name +
        "' (expected L, R, symdiff, size, size_raw or s@<z>)");
  }
  return pool;
}

int run_simulate(const SimulateOptions& options) {
  RunConfig cfg;
  cfg.steps = options.steps;
  cfg.seed = options.seed;
  cfg.replicate_index = options.replicate;
  cfg.thresholds = options.thresholds;
  cfg.initial_set = options.initial;
  if (!options.checkpoints.empty() && options.checkpoint_every > 0) {
    throw std::invalid_argument(
        "--checkpoints and --checkpoint-every are mutually exclusive");
  }
  if (options.checkpoint_every > 0) {
    for (std::uint64_t k = options.checkpoint_every; k < options.steps;
         k += options.checkpoint_every) {
      cfg.checkpoints.push_back(k);
    }
    cfg.checkpoints.push_back(options.steps);
  } else {
    cfg.checkpoints = options.checkpoints;
  }

  const RunConfig normalized = cfg.normalized();
  ObservableSet observers(normalized.thresholds,
                          normalized.steps <= 200'000);
  const auto records = run_path(normalized, observers);

  OutputTarget target(options.out);
  write_trace_header(target.stream(), normalized.thresholds);
  for (const ObservableRecord& rec : records) {
    write_trace_row(target.stream(), options.replicate, rec);
  }
  target.finish();
  return 0;
}

int run_ensemble_command(const EnsembleOptions& options) {
  ExperimentPlan plan;
  plan.base.steps = options.steps;
  plan.base.seed = options.seed;
  plan.base.thresholds = options.thresholds;
  plan.base.checkpoints = options.checkpoints;
  plan.replicates = options.replicates;
  for (const std::string& name : options.pools) {
    PoolSpec pool = parse_pool(name, options.steps);
    if (pool.kind == PoolSpec::Kind::kSAt) {
      plan.base.thresholds.push_back(pool.threshold);
    }
    plan.pools.push_back(std::move(pool));
  }

  const EnsembleSummary summary = run_ensemble(plan, options.jobs);
  OutputTarget target(options.out);
  target.stream() << summary_json(plan, summary) << '\n';
  target.finish();
  return 0;
}

int run_verify(const VerifyOptions& options) {
  const VerifyReport report =
      verify(options.suite, options.scale, options.jobs);
  for (const CheckResult& check : report.checks) {
    std::cerr << report_line(check) << '\n';
  }
  OutputTarget target(options.out);
  target.stream() << report_json(report) << '\n';
  target.finish();
  return report.all_passed() ? 0 : 2;
}

int run_theory(const TheoryOptions& options) {
  double lo = 0.0;
  double hi = 3.0;
  double step = 0.05;
  if (!options.grid.empty()) {
    std::istringstream in(options.grid);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0.0 || hi < lo) {
      throw std::invalid_argument("--grid expects a:b:step with step > 0");
    }
  }

  OutputTarget target(options.out);
  std::ostream& out = target.stream();
  out << "section,name,x,value\n";
  const theory::TheoryModel model;
  const std::pair<const char*, double> constants[] = {
      {"z0", model.z0},           {"mean_rate", model.mean_rate},
      {"clt_coeff", model.clt_coeff}, {"lr_scale", model.lr_scale},
      {"x_qvar", model.x_qvar},   {"n_qvar", model.n_qvar},
  };
  for (const auto& [name, value] : constants) {
    out << "constant," << name << ",," << format_double(value, "theory csv")
        << '\n';
  }

  std::vector<double> grid;
  for (double x = lo; x <= hi + 1e-12; x += step) grid.push_back(x);

  auto emit = [&](const char* name, double x, double value) {
    out << "grid," << name << ',' << format_double(x, "theory csv") << ','
        << format_double(value, "theory csv") << '\n';
  };
  // The critical threshold always appears in the drift grid; its drift is
  // zero by construction.
  emit("drift", theory::kZ0, theory::drift(theory::kZ0));
  for (double x : grid) {
    if (x >= 0.0 && x < 1.0) emit("drift", x, theory::drift(x));
    if (x >= 0.0 && x <= theory::kZ0) {
      emit("qvar_integrand_x", x, theory::qvar_integrand_x(x));
      emit("qvar_integrand_n", x, theory::qvar_integrand_n(x));
    }
    if (x >= 0.0) {
      emit("half_normal_scaled_cdf", x, theory::half_normal_scaled_cdf(x));
      emit("symdiff_limit_cdf", x, theory::symdiff_limit_cdf(x));
      emit("symdiff_limit_density", x, theory::symdiff_limit_density(x));
      emit("drifted_max_cdf@mu=-1", x, theory::drifted_max_cdf(x, -1.0));
      emit("drifted_max_cdf@mu=0", x, theory::drifted_max_cdf(x, 0.0));
      emit("drifted_max_cdf@mu=1", x, theory::drifted_max_cdf(x, 1.0));
    }
    emit("normal_cdf", x, theory::normal_cdf(x));
  }
  target.finish();
  return 0;
}

}  // namespace forgetting::cli

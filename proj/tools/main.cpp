#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "forgetting/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification laboratory for the minimum-"
               "eviction memory process"};
  app.require_subcommand(1);

  forgetting::cli::SimulateOptions sim;
  auto* simulate =
      app.add_subcommand("simulate", "Run one trace and write CSV records");
  simulate->add_option("--steps", sim.steps, "Number of arrivals")
      ->required();
  simulate->add_option("--seed", sim.seed, "Stream seed")->required();
  simulate->add_option("--replicate", sim.replicate, "Stream index");
  simulate->add_option("--thresholds", sim.thresholds,
                       "Tracked levels in (0,1); 1-1/e is always added")
      ->delimiter(',');
  auto* cp_list = simulate->add_option("--checkpoints", sim.checkpoints,
                                       "Snapshot step indices")
                      ->delimiter(',');
  simulate
      ->add_option("--checkpoint-every", sim.checkpoint_every,
                   "Snapshot every K steps (plus the final step)")
      ->excludes(cp_list);
  simulate
      ->add_option("--initial", sim.initial,
                   "Initial elements in [0,1); default 0")
      ->delimiter(',');
  simulate->add_option("--out", sim.out, "Output CSV path (default stdout)");

  forgetting::cli::EnsembleOptions ens;
  auto* ensemble = app.add_subcommand(
      "ensemble", "Run independent replicates and write a JSON summary");
  ensemble->add_option("--steps", ens.steps, "Arrivals per replicate")
      ->required();
  ensemble->add_option("--replicates", ens.replicates, "Replicate count")
      ->required();
  ensemble->add_option("--seed", ens.seed, "Base seed")->required();
  ensemble->add_option("--jobs", ens.jobs, "Worker threads (0 = all cores)");
  ensemble
      ->add_option("--pools", ens.pools,
                   "Sample pools: L,R,symdiff,size,size_raw,s@<z>")
      ->delimiter(',');
  ensemble
      ->add_option("--thresholds", ens.thresholds, "Extra tracked levels")
      ->delimiter(',');
  ensemble
      ->add_option("--checkpoints", ens.checkpoints,
                   "Snapshot step indices (default: final step)")
      ->delimiter(',');
  ensemble->add_option("--out", ens.out, "Output JSON path (default stdout)");

  forgetting::cli::VerifyOptions ver;
  auto* verify = app.add_subcommand(
      "verify", "Run the named verification checks and write a JSON report");
  verify
      ->add_option("--suite", ver.suite,
                   "all | oracle | invariants | distributional")
      ->check(CLI::IsMember({"all", "oracle", "invariants", "distributional"}));
  verify->add_option("--scale", ver.scale, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--jobs", ver.jobs, "Worker threads (0 = all cores)");
  verify->add_option("--out", ver.out, "Report JSON path (default stdout)");

  forgetting::cli::TheoryOptions theo;
  auto* theory = app.add_subcommand(
      "theory", "Print the closed-form constants and CDF grids as CSV");
  theory->add_option("--grid", theo.grid, "Grid as a:b:step (default 0:3:0.05)");
  theory->add_option("--out", theo.out, "Output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return forgetting::cli::run_simulate(sim);
    if (ensemble->parsed()) return forgetting::cli::run_ensemble_command(ens);
    if (verify->parsed()) return forgetting::cli::run_verify(ver);
    if (theory->parsed()) return forgetting::cli::run_theory(theo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

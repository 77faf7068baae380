#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "commands.hpp"
#include "rfcmpc/errors.hpp"
#include "rfcmpc/simulator.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIntegrity = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace rfcmpc;
  CLI::App app{"Receding-horizon scheduling of a reversible fuel cell in an energy community"};
  app.require_subcommand(1);

  cli::Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", common.config, "key=value configuration file");
    if (needs_config) opt->required();
    sub->add_option("--seed", common.seed, "override the configured seed");
    sub->add_option("-o,--out-dir", common.out_dir, "override the configured output directory");
    sub->add_option("--external-solver", common.external_solver,
                    "solver command template with {mps} and {sol}");
  };

  cli::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train the Markov chain forecaster on history");
  add_common(train, true);
  train->add_option("--history", train_args.history, "history CSV (overrides history_csv)");
  train->add_option("--tau", train_args.tau, "spawn threshold (overrides tau)");
  train->add_option("--out", train_args.output, "graph file name inside the output directory");

  cli::ForecastArgs forecast_args;
  auto* forecast = app.add_subcommand("forecast", "sample joint load/PV paths");
  add_common(forecast, true);
  forecast->add_option("--graph", forecast_args.graph, "trained graph (default: train on history)");
  forecast->add_option("--at", forecast_args.at, "first forecast quarter-hour, ISO-8601 UTC")->required();
  forecast->add_option("--out", forecast_args.output, "paths CSV name inside the output directory");

  cli::ReduceArgs reduce_args;
  auto* reduce = app.add_subcommand("reduce-scenarios", "reduce sampled paths to S scenarios");
  add_common(reduce, true);
  reduce->add_option("--paths", reduce_args.paths, "paths CSV written by forecast")->required();
  reduce->add_option("--at", reduce_args.at, "also write snapshot.txt for this quarter-hour");
  reduce->add_option("--out", reduce_args.output, "scenario CSV name inside the output directory");

  cli::SolveOnceArgs solve_args;
  auto* solve = app.add_subcommand("solve-once", "build and solve one stage problem");
  add_common(solve, true);
  solve->add_option("--snapshot", solve_args.snapshot, "snapshot file")->required();
  solve->add_option("--export-mps", solve_args.export_mps, "write the model as MPS");
  solve->add_option("--out", solve_args.output, "plan CSV name inside the output directory");

  cli::SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "closed-loop simulation");
  add_common(simulate, true);
  simulate->add_flag("--compare", sim_args.compare, "also run without the RFC and report the difference");

  cli::GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate-data", "write the synthetic history, actuals and prices");
  add_common(generate, false);
  generate->add_option("--start", gen_args.start, "first simulated quarter-hour");
  generate->add_option("--history-days", gen_args.history_days, "days of training history before start");
  generate->add_option("--days", gen_args.days, "days of actuals from start");
  generate->add_option("--data-seed", gen_args.seed, "noise seed");

  auto* keys = app.add_subcommand("config-template", "print every configuration key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*train) return cli::train(common, train_args);
    if (*forecast) return cli::forecast(common, forecast_args);
    if (*reduce) return cli::reduce_scenarios(common, reduce_args);
    if (*solve) return cli::solve_once(common, solve_args);
    if (*simulate) return cli::simulate(common, sim_args);
    if (*generate) return cli::generate_data(common, gen_args);
    if (*keys) return cli::config_template();
  } catch (const StepFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.cause) {
      case StepFailure::Cause::Solver: return kExitSolver;
      case StepFailure::Cause::Integrity: return kExitIntegrity;
      case StepFailure::Cause::Input: return kExitInput;
    }
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const BridgeError& e) {
    std::cerr << "external solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const BuildError& e) {
    std::cerr << "build error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

#include <benchmark/benchmark.h>

#include <vector>

#include "rfcmpc/forecaster.hpp"
#include "rfcmpc/milp_solver.hpp"
#include "rfcmpc/mpc_controller.hpp"
#include "rfcmpc/scenario_reduction.hpp"
#include "rfcmpc/stage_problem.hpp"
#include "rfcmpc/synthetic.hpp"

namespace {

using namespace rfcmpc;

constexpr Timestamp kMonday = 1714953600;  // 2024-05-06T00:00:00Z

struct Fixture {
  PowerSeries history;
  DmcGraph graph;

  Fixture() {
    history = synthetic_power(SyntheticSite{}, kMonday - 28 * 96 * kStepSeconds, 28 * 96, 11);
    graph = train(history.observations(), 0.1);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

/// Stage problem at a morning step: T steps, S reduced scenarios.
StageModel morning_stage(std::size_t horizon, std::size_t scenarios) {
  const Fixture& f = fixture();
  const Observation now = f.history.at(f.history.size() - 96 + 28);
  const auto paths = sample_paths(f.graph, now, horizon, 100, 3);
  const ScenarioSet set = reduce(paths, scenarios).drop_front(1);
  const PriceSeries prices = synthetic_prices(SyntheticSite{}, kMonday, horizon);
  PlantState state;
  state.mode = Mode::Sofc;
  return build(make_stage_data(state, set, prices.price, PlantParams{}, ControllerSettings{}));
}

void BM_TrainChain(benchmark::State& state) {
  const auto obs = fixture().history.observations();
  for (auto _ : state) benchmark::DoNotOptimize(train(obs, 0.1));
}
BENCHMARK(BM_TrainChain)->Unit(benchmark::kMillisecond);

void BM_SamplePaths(benchmark::State& state) {
  const Fixture& f = fixture();
  const Observation now = f.history.at(f.history.size() - 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_paths(f.graph, now, 16, n, 5));
}
BENCHMARK(BM_SamplePaths)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ReduceScenarios(benchmark::State& state) {
  const Fixture& f = fixture();
  const auto paths = sample_paths(f.graph, f.history.at(f.history.size() - 1), 16, 300, 5);
  for (auto _ : state) benchmark::DoNotOptimize(reduce(paths, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ReduceScenarios)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_StageRelaxation(benchmark::State& state) {
  const StageModel stage = morning_stage(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(stage.model));
}
BENCHMARK(BM_StageRelaxation)->Arg(4)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_StageMilp(benchmark::State& state) {
  const StageModel stage = morning_stage(static_cast<std::size_t>(state.range(0)), 5);
  SolveOptions opt;
  opt.node_limit = 100;
  opt.branch_priority = stage.branch_priority();
  for (auto _ : state) benchmark::DoNotOptimize(solve(stage.model, opt));
}
BENCHMARK(BM_StageMilp)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

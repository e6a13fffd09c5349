#include <benchmark/benchmark.h>

#include "rampflow/config.hpp"
#include "rampflow/scenario.hpp"

namespace {

rampflow::Scenario onramp_scenario(int n_cells) {
  auto config = rampflow::load_config("single_onramp");
  config.grid.n_cells = n_cells;
  return rampflow::build_scenario(config);
}

void BM_Step(benchmark::State& state) {
  const auto scenario = onramp_scenario(static_cast<int>(state.range(0)));
  auto field = scenario.initial;
  const double dt = rampflow::compute_dt(field, scenario.setup);
  for (auto _ : state) {
    auto result = rampflow::step(field, dt, scenario.setup);
    benchmark::DoNotOptimize(result.state.rho.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(250)->Arg(1000)->Arg(4000);

void BM_ReactiveWeights(benchmark::State& state) {
  const rampflow::ReactiveKernel kernel(0.5, 0.1);
  const double dx = 5.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto w = rampflow::discretize_reactive(kernel, dx);
    benchmark::DoNotOptimize(w.weights.data());
  }
}
BENCHMARK(BM_ReactiveWeights)->Arg(250)->Arg(1000)->Arg(4000);

void BM_FullRun(benchmark::State& state) {
  const auto scenario = onramp_scenario(1000);
  for (auto _ : state) {
    auto traj = rampflow::simulate(scenario.initial, scenario.setup);
    benchmark::DoNotOptimize(traj.final_state.rho.data());
  }
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "evcharge/demand.hpp"
#include "evcharge/scenario_io.hpp"
#include "evcharge/simulator.hpp"

using namespace evcharge;

static void BM_SimulateDay(benchmark::State& state) {
  const Scenario sc = make_synthetic_scenario({}, 1);
  const auto demand = generate_demand(DemandProfile::weekday(), static_cast<std::size_t>(state.range(1)), 1);
  SimulationOptions o;
  o.policy = static_cast<Policy>(state.range(0));
  o.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(sc, sc.layout, demand, o).z);
  state.SetLabel(to_string(o.policy));
}
BENCHMARK(BM_SimulateDay)
    ->ArgsProduct({{static_cast<long>(Policy::ncp), static_cast<long>(Policy::fcfs), static_cast<long>(Policy::ocp),
                    static_cast<long>(Policy::ocp_a)},
                   {1000}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "evcharge/assignment.hpp"
#include "evcharge/lagrangian.hpp"
#include "generators.hpp"

using namespace evcharge;

static void BM_SolveExact(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = testkit::random_instance(rng, n, n, false);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(in).objective);
}
BENCHMARK(BM_SolveExact)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Lagrangian(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = testkit::random_instance(rng, n, n, false);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lagrangian(in, 0.005).solution.objective);
}
BENCHMARK(BM_Lagrangian)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

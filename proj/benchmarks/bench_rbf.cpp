#include <benchmark/benchmark.h>

#include <cmath>
#include <set>

#include "evcharge/random.hpp"
#include "evcharge/rbf.hpp"

using namespace evcharge;

static void BM_FitRbf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int dim = 30;
  Rng rng(3);
  std::set<std::vector<int>> seen;
  std::vector<EvaluatedPoint> pts;
  while (pts.size() < n) {
    std::vector<int> u(dim);
    for (auto& x : u) x = static_cast<int>(rng.below(3));
    if (seen.insert(u).second) pts.push_back({u, rng.uniform(0.0, 100.0)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_rbf(pts).a);
}
BENCHMARK(BM_FitRbf)->Arg(30)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

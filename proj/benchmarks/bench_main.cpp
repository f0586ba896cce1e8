#include <benchmark/benchmark.h>
#include "starlab/specfun.hpp"

static void BM_BesselJ(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(starlab::bessel_j(3.5, 100.0));
}
BENCHMARK(BM_BesselJ);

BENCHMARK_MAIN();

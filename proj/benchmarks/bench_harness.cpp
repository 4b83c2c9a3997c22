#include <benchmark/benchmark.h>

#include "freeharness/harnesscheck.hpp"

namespace {

using namespace freeharness;

void BM_Covariance(benchmark::State& state) {
  const HarnessParams p{1.0, 1.0, 0.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(check_covariance(p, 1.0, 2.0));
}
BENCHMARK(BM_Covariance)->Unit(benchmark::kMillisecond);

void BM_LinregDegree4(benchmark::State& state) {
  const HarnessParams p{1.0, 1.0, 0.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(check_linreg_polynomial(p, 0.5, 1.0, 2.0, 4, 4));
}
BENCHMARK(BM_LinregDegree4)->Unit(benchmark::kMillisecond);

void BM_SuiteAll(benchmark::State& state) {
  const HarnessParams p{3.0, 2.5, 0.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(p, Suite::All));
}
BENCHMARK(BM_SuiteAll)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

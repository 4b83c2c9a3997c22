#include <benchmark/benchmark.h>

#include "freeharness/operator.hpp"

namespace {

using namespace freeharness;

const HarnessParams kParams{1.0, -0.5, 0.5, 0.25};

void BM_BuildXY(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_xy(kParams, n));
}
BENCHMARK(BM_BuildXY)->Arg(40)->Arg(160);

void BM_QCommutation(benchmark::State& state) {
  const OperatorPair xy = build_xy(kParams, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_q_commutation(kParams, xy));
}
BENCHMARK(BM_QCommutation)->Arg(40)->Arg(160);

void BM_QuadraticForm(benchmark::State& state) {
  const OperatorPair xy = build_xy(kParams, 40);
  for (auto _ : state) benchmark::DoNotOptimize(check_quadratic_form(kParams, xy, 0.5, 1.0, 2.0));
}
BENCHMARK(BM_QuadraticForm);

}  // namespace

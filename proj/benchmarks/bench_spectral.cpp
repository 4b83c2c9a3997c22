#include <benchmark/benchmark.h>

#include "freeharness/kernel.hpp"
#include "freeharness/spectral.hpp"

namespace {

using namespace freeharness;

const HarnessParams kCase2{3.0, 2.5, 0.5, 0.5};

void BM_BuildMeasure(benchmark::State& state) {
  const EcRecurrence r = martingale_recurrence(kCase2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_measure(r));
}
BENCHMARK(BM_BuildMeasure);

void BM_Density(benchmark::State& state) {
  const SpectralMeasure m = law_pi(kCase2, 1.0);
  const Interval iv = m.ac_interval();
  double x = iv.lo;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.density(x));
    x += iv.width() / 997.0;
    if (x > iv.hi) x = iv.lo;
  }
}
BENCHMARK(BM_Density);

void BM_GaussRule(benchmark::State& state) {
  const SpectralMeasure m = law_pi(kCase2, 1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(m.gauss_rule(n));
}
BENCHMARK(BM_GaussRule)->Arg(16)->Arg(64);

void BM_CauchyContinuedFraction(benchmark::State& state) {
  const EcRecurrence r = martingale_recurrence(kCase2, 1.0);
  const Complex z(1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_cf(r, z));
}
BENCHMARK(BM_CauchyContinuedFraction);

void BM_GolubWelsch(benchmark::State& state) {
  const EcRecurrence r = martingale_recurrence(kCase2, 1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_quadrature(r, n));
}
BENCHMARK(BM_GolubWelsch)->Arg(16)->Arg(128);

}  // namespace

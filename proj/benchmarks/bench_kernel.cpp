#include <array>

#include <benchmark/benchmark.h>

#include "freeharness/kernel.hpp"

namespace {

using namespace freeharness;

const HarnessParams kCase1{1.0, 1.0, 0.5, 0.5};

void BM_Transition(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(transition(kCase1, 1.0, 0.3, 2.0));
}
BENCHMARK(BM_Transition);

void BM_CdfTable(benchmark::State& state) {
  const SpectralMeasure m = law_pi(kCase1, 1.0);
  const int panels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(CdfTable(m, panels));
}
BENCHMARK(BM_CdfTable)->Arg(128)->Arg(4096);

void BM_SampleFromTable(benchmark::State& state) {
  const CdfTable table(law_pi(kCase1, 1.0));
  Philox rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample(table, rng));
}
BENCHMARK(BM_SampleFromTable);

void BM_Path(benchmark::State& state) {
  const std::array<double, 4> times{0.5, 1.0, 2.0, 4.0};
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(kCase1, times, 7, i++));
}
BENCHMARK(BM_Path);

void BM_ChapmanKolmogorov(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_chapman_kolmogorov(kCase1, 0.5, 1.0, 2.0, 0.0));
}
BENCHMARK(BM_ChapmanKolmogorov)->Unit(benchmark::kMillisecond);

}  // namespace

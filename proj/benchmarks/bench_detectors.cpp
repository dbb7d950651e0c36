#include <benchmark/benchmark.h>

#include <random>

#include "wmsense/periodogram_detector.hpp"
#include "wmsense/scf_detector.hpp"
#include "wmsense/spectral.hpp"
#include "wmsense/harness/simulate.hpp"

using namespace wmsense;

namespace {

std::vector<cplx> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(g(rng), g(rng));
  return x;
}

void BM_Periodogram(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(periodogram(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Periodogram)->RangeMultiplier(4)->Range(256, 16384);

void BM_AugmentedSlices(benchmark::State& state) {
  const auto frame = dtft_frame(noise(4096), static_cast<std::size_t>(state.range(0)));
  const auto windows = ScfWindows::centered(5, 10);
  for (auto _ : state) benchmark::DoNotOptimize(augmented_slices(frame, 0.1, 1.0, windows));
}
BENCHMARK(BM_AugmentedSlices)->Arg(9)->Arg(33)->Arg(129);

void BM_PeriodogramTrial(benchmark::State& state) {
  harness::ExperimentConfig c;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::trial_statistic(c, harness::DetectorKind::periodogram, -21.0, 0.7,
                                                      harness::Hypothesis::fm, ++seed));
  }
}
BENCHMARK(BM_PeriodogramTrial)->Unit(benchmark::kMillisecond);

void BM_ScfTrial(benchmark::State& state) {
  harness::ExperimentConfig c;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::trial_statistic(c, harness::DetectorKind::scf, -21.0, 2.0,
                                                      harness::Hypothesis::fm, ++seed));
  }
}
BENCHMARK(BM_ScfTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "reqisc/bench.hpp"

namespace {

using namespace reqisc;

const NormalForm& xy_form() {
  static const NormalForm nf = normal_form(preset(CouplingPreset::xy, 1.0));
  return nf;
}

void BM_HaarDurationSerial(benchmark::State& state) {
  const long n = state.range(0);
  for (auto _ : state) {
    auto stats = haar_duration_stats_serial(xy_form(), n, 42);
    benchmark::DoNotOptimize(stats.mean_tau);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_HaarDurationSerial)->Arg(2000)->Arg(20000)
    ->Unit(benchmark::kMillisecond);

void BM_HaarDurationParallel(benchmark::State& state) {
  const long n = state.range(0);
  for (auto _ : state) {
    auto stats = haar_duration_stats(xy_form(), n, 42);
    benchmark::DoNotOptimize(stats.mean_tau);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_HaarDurationParallel)->Arg(2000)->Arg(20000)
    ->Unit(benchmark::kMillisecond);

void BM_ChamberGridSerial(benchmark::State& state) {
  auto h = preset(CouplingPreset::xy, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        chamber_grid_worst_residual_serial(h, state.range(0)));
  }
}
BENCHMARK(BM_ChamberGridSerial)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ChamberGridParallel(benchmark::State& state) {
  auto h = preset(CouplingPreset::xy, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chamber_grid_worst_residual(h, state.range(0)));
  }
}
BENCHMARK(BM_ChamberGridParallel)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

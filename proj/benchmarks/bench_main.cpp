#include <benchmark/benchmark.h>

#include "arwlab/chaos.hpp"
#include "arwlab/zerofinder.hpp"

using namespace arw;

namespace {

WaveSample sample_at(long n) {
  RngStream rng(99, static_cast<std::uint64_t>(n), 0, kTagWave);
  return sample_wave(make_level(n), rng);
}

void BM_LocateZeros(benchmark::State& state) {
  auto s = sample_at(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(locate_zeros(s).count());
  state.counters["zeros"] = static_cast<double>(locate_zeros(s).count());
}
BENCHMARK(BM_LocateZeros)->Arg(5)->Arg(25)->Arg(65)->Arg(325)->Unit(benchmark::kMillisecond);

void BM_Projection4Exact(benchmark::State& state) {
  auto s = sample_at(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(projection4_exact(s));
}
BENCHMARK(BM_Projection4Exact)->Arg(25)->Arg(65)->Arg(325)->Unit(benchmark::kMicrosecond);

void BM_EvaluateGrid(benchmark::State& state) {
  auto s = sample_at(25);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(s, m).jets.data());
  state.SetItemsProcessed(state.iterations() * m * m);
}
BENCHMARK(BM_EvaluateGrid)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

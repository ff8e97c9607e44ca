#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "smi/changepoint.hpp"

namespace {

std::vector<double> series(std::size_t n) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0, 1);
  std::vector<double> x(n);
  double level = 30;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 60 == 59) level = level > 20 ? 12 : 30;
    x[i] = level + noise(rng);
  }
  return x;
}

void BM_Pelt(benchmark::State& state) {
  const auto x = series(static_cast<std::size_t>(state.range(0)));
  const double pen = smi::changepoint::default_penalty(x);
  for (auto _ : state) benchmark::DoNotOptimize(smi::changepoint::pelt_l2(x, pen));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pelt)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Stationarity(benchmark::State& state) {
  const auto x = series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smi::changepoint::stationarity_score(x, 7));
}
BENCHMARK(BM_Stationarity)->Arg(120)->Arg(480);

}  // namespace

BENCHMARK_MAIN();

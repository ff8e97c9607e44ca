#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "smi/geo.hpp"

namespace {

std::vector<smi::geo::Point> random_points(std::size_t n, double spread, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(-spread, spread), lon(-180, 180);
  std::vector<smi::geo::Point> pts(n);
  for (auto& p : pts) p = {lat(rng), lon(rng)};
  return pts;
}

void BM_DistanceLocal(benchmark::State& state) {
  auto pts = random_points(1024, 60, 1);
  for (auto& p : pts) p.longitude = p.longitude * 0.001;  // short lines
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smi::geo::geodesic_distance_km(pts[i % 1024], pts[(i + 1) % 1024]));
    ++i;
  }
}
BENCHMARK(BM_DistanceLocal);

void BM_DistanceGlobal(benchmark::State& state) {
  const auto pts = random_points(1024, 90, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smi::geo::geodesic_distance_km(pts[i % 1024], pts[(i + 7) % 1024]));
    ++i;
  }
}
BENCHMARK(BM_DistanceGlobal);

void BM_NearAntipodal(benchmark::State& state) {
  const smi::geo::Point a{0.3, 0}, b{-0.29, 179.8};
  for (auto _ : state) benchmark::DoNotOptimize(smi::geo::geodesic_distance_km(a, b));
}
BENCHMARK(BM_NearAntipodal);

void BM_Centroid(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 60, 3);
  for (auto _ : state) benchmark::DoNotOptimize(smi::geo::centroid(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Centroid)->Range(4, 4096);

}  // namespace

BENCHMARK_MAIN();

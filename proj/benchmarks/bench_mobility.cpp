#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "smi/mobility.hpp"

namespace {

using smi::ingest::GeoEvent;

std::vector<GeoEvent> corpus(std::size_t users, std::size_t per_user) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> off(0, 0.2);
  const smi::Instant t0 = *smi::parse_date("2020-01-06");
  std::vector<GeoEvent> events;
  events.reserve(users * per_user);
  for (std::size_t u = 0; u < users; ++u) {
    const double lat = 30 + static_cast<double>(u % 15), lon = -120 + static_cast<double>(u % 45);
    for (std::size_t k = 0; k < per_user; ++k) {
      GeoEvent e;
      e.user_id = "u" + std::to_string(u);
      e.event_id = e.user_id + "-" + std::to_string(k);
      e.timestamp = t0 + std::chrono::seconds{static_cast<long>(rng() % (16 * 7 * 86400))};
      e.latitude = lat + off(rng);
      e.longitude = lon + off(rng);
      events.push_back(std::move(e));
    }
  }
  smi::ingest::sort_events(events);
  return events;
}

void BM_WeeklyRecords(benchmark::State& state) {
  const auto events = corpus(2000, 64);
  const smi::WorkerPool pool(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    const auto traces = smi::mobility::build_weekly_traces(events, {});
    benchmark::DoNotOptimize(smi::mobility::compute_records(traces, pool));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(events.size()));
}
BENCHMARK(BM_WeeklyRecords)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DailyRecords(benchmark::State& state) {
  const auto events = corpus(500, 64);
  const smi::WorkerPool pool(static_cast<unsigned>(state.range(0)));
  const smi::Date first = *smi::parse_date("2020-01-06"), last = *smi::parse_date("2020-04-26");
  for (auto _ : state) {
    const auto traces = smi::mobility::build_daily_traces(events, first, last, {});
    benchmark::DoNotOptimize(smi::mobility::compute_records(traces, pool));
  }
}
BENCHMARK(BM_DailyRecords)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_AggregateLabeled(benchmark::State& state) {
  std::mt19937_64 rng(12);
  std::vector<smi::mobility::MobilityRecord> records(200000);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].region_id = "R" + std::to_string(rng() % 50);
    records[i].period = *smi::parse_date("2020-01-06") + std::chrono::days{7 * static_cast<int>(rng() % 16)};
    records[i].index_km = static_cast<double>(rng() % 100000) / 1000.0;
  }
  const smi::WorkerPool pool(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smi::mobility::aggregate_labeled(records, pool));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(records.size()));
}
BENCHMARK(BM_AggregateLabeled)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

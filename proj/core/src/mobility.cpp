#include "smi/mobility.hpp"

#include "smi/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace smi::mobility {

namespace {

using std::chrono::days;

// Slice of one user's events that falls inside the filter's date range.
struct UserBlock {
  std::span<const GeoEvent> events;
};

std::vector<UserBlock> user_blocks(std::span<const GeoEvent> events, const TraceFilter& filter) {
  std::vector<UserBlock> blocks;
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    while (j < events.size() && events[j].user_id == events[i].user_id) ++j;
    std::size_t lo = i, hi = j;
    if (filter.start) {
      while (lo < hi && to_date(events[lo].timestamp) < *filter.start) ++lo;
    }
    if (filter.end) {
      while (hi > lo && to_date(events[hi - 1].timestamp) > *filter.end) --hi;
    }
    if (hi - lo >= static_cast<std::size_t>(std::max(filter.min_lifetime_events, 0)) && hi > lo) {
      blocks.push_back({events.subspan(lo, hi - lo)});
    }
    i = j;
  }
  return blocks;
}

std::vector<geo::Point> points_of(std::span<const GeoEvent> events) {
  std::vector<geo::Point> pts;
  pts.reserve(events.size());
  for (const GeoEvent& e : events) pts.push_back(e.point());
  return pts;
}

void append_windows(std::span<const GeoEvent> block, Date first, Date last,
                    const TraceFilter& filter, int window,
                    std::vector<UserPeriodTrace>& out) {
  const Date first_event = to_date(block.front().timestamp);
  const Date last_event = to_date(block.back().timestamp);
  const Date from = std::max(first, first_event);
  const Date to = std::min(last, last_event + days{window - 1});
  std::size_t lo = 0, hi = 0;
  for (Date d = from; d <= to; d += days{1}) {
    const Date window_start = d - days{window - 1};
    while (lo < block.size() && to_date(block[lo].timestamp) < window_start) ++lo;
    hi = std::max(hi, lo);
    while (hi < block.size() && to_date(block[hi].timestamp) <= d) ++hi;
    if (hi - lo >= static_cast<std::size_t>(filter.min_period_events)) {
      out.push_back({block.front().user_id, d, block.subspan(lo, hi - lo)});
    }
  }
}

}  // namespace

DispersionIndex dispersion_index(std::span<const geo::Point> points) {
  const geo::Centroid c = geo::centroid(points);
  std::vector<double> distances;
  distances.reserve(points.size());
  for (const geo::Point& p : points) distances.push_back(geo::geodesic_distance_km(p, c.point));
  return {c.point, population_stddev(distances), c.degenerate};
}

MobilityRecord user_period_index(const UserPeriodTrace& trace) {
  if (trace.events.empty()) throw std::invalid_argument("user_period_index: empty trace");
  const auto pts = points_of(trace.events);
  const DispersionIndex idx = dispersion_index(pts);
  MobilityRecord r;
  r.user_id = std::string(trace.user_id);
  r.period = trace.period;
  r.home = idx.home;
  r.index_km = idx.index_km;
  r.checkins = static_cast<int>(trace.events.size());
  r.degenerate = idx.degenerate;
  return r;
}

void require_sorted(std::span<const GeoEvent> events) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (std::tie(events[i].user_id, events[i].timestamp) <
        std::tie(events[i - 1].user_id, events[i - 1].timestamp)) {
      throw std::invalid_argument("events must be sorted by (user_id, timestamp)");
    }
  }
}

std::vector<UserPeriodTrace> build_weekly_traces(std::span<const GeoEvent> events,
                                                 const TraceFilter& filter) {
  require_sorted(events);
  std::vector<UserPeriodTrace> traces;
  for (const UserBlock& block : user_blocks(events, filter)) {
    const auto& ev = block.events;
    std::size_t i = 0;
    while (i < ev.size()) {
      const Date week = week_start(ev[i].timestamp);
      std::size_t j = i;
      while (j < ev.size() && week_start(ev[j].timestamp) == week) ++j;
      if (j - i >= static_cast<std::size_t>(filter.min_period_events)) {
        traces.push_back({ev[i].user_id, week, ev.subspan(i, j - i)});
      }
      i = j;
    }
  }
  return traces;
}

std::vector<UserPeriodTrace> build_daily_traces(std::span<const GeoEvent> events, Date day,
                                                const TraceFilter& filter, int window) {
  return build_daily_traces(events, day, day, filter, window);
}

std::vector<UserPeriodTrace> build_daily_traces(std::span<const GeoEvent> events, Date first,
                                                Date last, const TraceFilter& filter,
                                                int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  require_sorted(events);
  std::vector<UserPeriodTrace> traces;
  for (const UserBlock& block : user_blocks(events, filter)) {
    append_windows(block.events, first, last, filter, window, traces);
  }
  std::stable_sort(traces.begin(), traces.end(),
                   [](const UserPeriodTrace& a, const UserPeriodTrace& b) {
                     return std::tie(a.period, a.user_id) < std::tie(b.period, b.user_id);
                   });
  return traces;
}

std::vector<MobilityRecord> compute_records(std::span<const UserPeriodTrace> traces,
                                            const WorkerPool& pool) {
  std::vector<MobilityRecord> records(traces.size());
  pool.parallel_for(traces.size(), [&](std::size_t i) { records[i] = user_period_index(traces[i]); });
  return records;
}

ProfileMap build_profiles(std::span<const GeoEvent> events, const TraceFilter& filter,
                          const geo::RegionIndex* regions, std::span<const geo::Level> levels,
                          const std::string& country_id, const WorkerPool& pool) {
  require_sorted(events);
  const auto blocks = user_blocks(events, filter);
  std::vector<UserProfile> profiles(blocks.size());
  pool.parallel_for(blocks.size(), [&](std::size_t i) {
    const auto& ev = blocks[i].events;
    UserProfile& p = profiles[i];
    p.user_id = ev.front().user_id;
    p.total_events = ev.size();
    p.alltime_centroid = geo::centroid(points_of(ev)).point;
    for (geo::Level level : levels) {
      if (level == geo::Level::country) {
        p.region[level] = country_id;
      } else {
        if (!regions) throw ConfigError("region geometry required for level " +
                                        std::string(geo::to_string(level)));
        p.region[level] = regions->assign(p.alltime_centroid, level);
      }
    }
  });
  ProfileMap out;
  for (UserProfile& p : profiles) {
    std::string key = p.user_id;
    out.emplace(std::move(key), std::move(p));
  }
  return out;
}

std::vector<MobilityRecord> label_records(std::span<const MobilityRecord> records,
                                          const ProfileMap& profiles, geo::Level level) {
  std::vector<MobilityRecord> out;
  out.reserve(records.size());
  for (const MobilityRecord& r : records) {
    auto it = profiles.find(r.user_id);
    if (it == profiles.end()) continue;
    auto lv = it->second.region.find(level);
    if (lv == it->second.region.end() || !lv->second) continue;
    MobilityRecord copy = r;
    copy.region_id = *lv->second;
    out.push_back(std::move(copy));
  }
  return out;
}

RegionSeriesSet aggregate_labeled(std::span<const MobilityRecord> labeled, const WorkerPool& pool) {
  using Key = std::pair<std::string_view, Date>;
  using Partial = std::map<Key, RunningStats>;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (labeled.size() + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks);
  pool.parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(labeled.size(), lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      partials[c][{labeled[i].region_id, labeled[i].period}].add(labeled[i].index_km);
    }
  });
  Partial merged;
  for (const Partial& part : partials) {
    for (const auto& [key, stats] : part) merged[key].merge(stats);
  }
  RegionSeriesSet out;
  for (const auto& [key, stats] : merged) {
    RegionSeries& series = out[std::string(key.first)];
    series.region_id = key.first;
    series.periods[key.second] = {stats.mean(), stats.variance(), stats.count()};
  }
  return out;
}

RegionSeriesSet aggregate(std::span<const MobilityRecord> records, const ProfileMap& profiles,
                          geo::Level level, const std::string& country_id,
                          const WorkerPool& pool) {
  std::vector<MobilityRecord> labeled = label_records(records, profiles, level);
  RegionSeriesSet out = aggregate_labeled(labeled, pool);
  if (level != geo::Level::country) {
    std::vector<MobilityRecord> all(records.begin(), records.end());
    for (MobilityRecord& r : all) r.region_id = country_id;
    RegionSeriesSet country = aggregate_labeled(all, pool);
    for (auto& [id, series] : country) out[id] = std::move(series);
  }
  return out;
}

RegionSeriesSet smooth_daily(const RegionSeriesSet& daily, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  RegionSeriesSet out;
  for (const auto& [id, series] : daily) {
    if (series.periods.empty()) continue;
    RegionSeries smoothed{id, {}};
    const Date first = series.periods.begin()->first;
    const Date last = series.periods.rbegin()->first;
    for (Date d = first; d <= last; d += days{1}) {
      double mean_sum = 0, var_sum = 0;
      std::size_t n = 0, users = 0;
      for (auto it = series.periods.lower_bound(d - days{window - 1});
           it != series.periods.end() && it->first <= d; ++it) {
        mean_sum += it->second.mean_km;
        var_sum += it->second.variance;
        users += it->second.users;
        ++n;
      }
      if (n == 0) continue;
      smoothed.periods[d] = {mean_sum / static_cast<double>(n), var_sum / static_cast<double>(n),
                             users};
    }
    out.emplace(id, std::move(smoothed));
  }
  return out;
}

std::vector<WeekVolume> weekly_volumes(std::span<const GeoEvent> events, const TraceFilter& filter) {
  std::map<Date, WeekVolume> weeks;
  std::map<Date, std::string_view> last_user;
  for (const GeoEvent& e : events) {
    const Date day = to_date(e.timestamp);
    if ((filter.start && day < *filter.start) || (filter.end && day > *filter.end)) continue;
    const Date week = week_start(day);
    WeekVolume& v = weeks[week];
    v.week = week;
    ++v.records;
    auto [it, inserted] = last_user.try_emplace(week, e.user_id);
    if (inserted || it->second != e.user_id) {
      // Events arrive grouped by user, so a change of user is a new user.
      if (!inserted) it->second = e.user_id;
      ++v.users;
    }
  }
  std::vector<WeekVolume> out;
  for (auto& [week, v] : weeks) out.push_back(v);
  return out;
}

LowDataExclusion exclude_lowdata_periods(std::span<const WeekVolume> volumes, double confidence,
                                         std::size_t min_weeks) {
  LowDataExclusion result;
  result.z = normal_quantile(confidence);
  if (volumes.size() < min_weeks) {
    result.insufficient_data = true;
    return result;
  }
  std::vector<double> users, records;
  for (const WeekVolume& v : volumes) {
    users.push_back(static_cast<double>(v.users));
    records.push_back(static_cast<double>(v.records));
  }
  result.user_threshold = mean(users) - result.z * population_stddev(users);
  result.record_threshold = mean(records) - result.z * population_stddev(records);
  for (const WeekVolume& v : volumes) {
    if (static_cast<double>(v.users) < result.user_threshold ||
        static_cast<double>(v.records) < result.record_threshold) {
      result.excluded.push_back(v.week);
    }
  }
  return result;
}

void drop_periods(RegionSeriesSet& series, std::span<const Date> weeks) {
  for (auto& [id, s] : series) {
    for (Date w : weeks) s.periods.erase(w);
  }
}

void drop_periods(std::vector<MobilityRecord>& records, std::span<const Date> weeks) {
  std::erase_if(records, [&](const MobilityRecord& r) {
    return std::find(weeks.begin(), weeks.end(), r.period) != weeks.end();
  });
}

std::optional<BoxSummary> log1p_distribution_summary(std::span<const MobilityRecord> records,
                                                     Date from, Date to) {
  std::map<std::string_view, std::pair<double, std::size_t>> per_user;
  for (const MobilityRecord& r : records) {
    if (r.period < from || r.period > to) continue;
    auto& acc = per_user[r.user_id];
    acc.first += r.index_km;
    ++acc.second;
  }
  std::vector<double> values;
  values.reserve(per_user.size());
  for (const auto& [user, acc] : per_user) {
    values.push_back(std::log1p(acc.first / static_cast<double>(acc.second)));
  }
  return box_summary(std::move(values));
}

}  // namespace smi::mobility

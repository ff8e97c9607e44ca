#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smi/geo.hpp"
#include "smi/ingest.hpp"
#include "smi/parallel.hpp"
#include "smi/region.hpp"
#include "smi/stats.hpp"
#include "smi/time.hpp"

namespace smi::mobility {

using ingest::GeoEvent;

// A user's events inside one period. `period` is the Monday of the week for
// weekly traces and the last day of the window for daily traces. The events
// are a contiguous slice of a (user, timestamp)-sorted event vector.
struct UserPeriodTrace {
  std::string_view user_id;
  Date period;
  std::span<const GeoEvent> events;
};

struct MobilityRecord {
  std::string user_id;
  Date period;
  std::string region_id;  // empty until labeled for a level
  geo::Point home;        // centroid of the period's check-ins
  double index_km = 0;
  int checkins = 0;
  bool degenerate = false;  // centroid fell back to the first point

  friend bool operator==(const MobilityRecord&, const MobilityRecord&) = default;
};

struct DispersionIndex {
  geo::Point home;
  double index_km = 0;
  bool degenerate = false;
};

// Population standard deviation of the geodesic distances from each point to
// the points' spherical centroid. Two points give a value close to zero; it is
// exactly zero only when the pair is symmetric about the centroid on the
// ellipsoid (for example two points on the equator).
DispersionIndex dispersion_index(std::span<const geo::Point> points);

MobilityRecord user_period_index(const UserPeriodTrace& trace);

struct TraceFilter {
  int min_lifetime_events = 3;  // users below this are dropped entirely
  int min_period_events = 2;    // user-periods below this are dropped
  std::optional<Date> start;    // inclusive; events outside are ignored
  std::optional<Date> end;      // inclusive
};

// Throws std::invalid_argument unless events are sorted by (user, timestamp).
void require_sorted(std::span<const GeoEvent> events);

// Groups by (user, Monday-start UTC week) after the lifetime and weekly
// count filters.
std::vector<UserPeriodTrace> build_weekly_traces(std::span<const GeoEvent> events,
                                                 const TraceFilter& filter);

// Trailing windows of `window` calendar days ending on `day`.
std::vector<UserPeriodTrace> build_daily_traces(std::span<const GeoEvent> events, Date day,
                                                const TraceFilter& filter, int window = 7);
// All trailing windows ending on days in [first, last].
std::vector<UserPeriodTrace> build_daily_traces(std::span<const GeoEvent> events, Date first,
                                                Date last, const TraceFilter& filter,
                                                int window = 7);

std::vector<MobilityRecord> compute_records(std::span<const UserPeriodTrace> traces,
                                            const WorkerPool& pool = WorkerPool{1});

struct UserProfile {
  std::string user_id;
  std::size_t total_events = 0;
  geo::Point alltime_centroid;
  std::map<geo::Level, std::optional<std::string>> region;
};

using ProfileMap = std::map<std::string, UserProfile, std::less<>>;

// One profile per user passing the lifetime filter. Regions are assigned
// from the all-time centroid; the country level always maps to country_id.
ProfileMap build_profiles(std::span<const GeoEvent> events, const TraceFilter& filter,
                          const geo::RegionIndex* regions, std::span<const geo::Level> levels,
                          const std::string& country_id, const WorkerPool& pool = WorkerPool{1});

// Copies records carrying the user's region at `level`; users without a
// region at that level are left out.
std::vector<MobilityRecord> label_records(std::span<const MobilityRecord> records,
                                          const ProfileMap& profiles, geo::Level level);

struct PeriodStats {
  double mean_km = 0;
  double variance = 0;
  std::size_t users = 0;

  friend bool operator==(const PeriodStats&, const PeriodStats&) = default;
};

struct RegionSeries {
  std::string region_id;
  std::map<Date, PeriodStats> periods;
};

using RegionSeriesSet = std::map<std::string, RegionSeries>;

// Groups labeled records by (region_id, period). Work is split into chunks
// whose exact accumulators are merged, so output is identical for any pool.
RegionSeriesSet aggregate_labeled(std::span<const MobilityRecord> labeled,
                                  const WorkerPool& pool = WorkerPool{1});

// Mean, population variance and count of user indices per (region, period)
// at `level`, plus the country series over every record.
RegionSeriesSet aggregate(std::span<const MobilityRecord> records, const ProfileMap& profiles,
                          geo::Level level, const std::string& country_id,
                          const WorkerPool& pool = WorkerPool{1});

// Simple trailing moving average of per-day aggregates: mean of the daily
// means over the window, mean of their variances, summed user-days.
RegionSeriesSet smooth_daily(const RegionSeriesSet& daily, int window = 7);

struct WeekVolume {
  Date week;
  std::size_t users = 0;    // distinct users posting that week
  std::size_t records = 0;  // geolocated events that week
};

std::vector<WeekVolume> weekly_volumes(std::span<const GeoEvent> events, const TraceFilter& filter);

struct LowDataExclusion {
  std::vector<Date> excluded;
  double z = 0;
  double user_threshold = 0;
  double record_threshold = 0;
  bool insufficient_data = false;  // fewer than min_weeks weeks: nothing excluded
};

// Flags weeks whose user or record count falls below mean - z*std, with z
// the standard normal quantile at `confidence` (one-sided).
LowDataExclusion exclude_lowdata_periods(std::span<const WeekVolume> volumes,
                                         double confidence = 0.9975, std::size_t min_weeks = 4);

void drop_periods(RegionSeriesSet& series, std::span<const Date> weeks);
void drop_periods(std::vector<MobilityRecord>& records, std::span<const Date> weeks);

// Box-plot statistics of ln(1 + mean index) over each user's records whose
// period lies in [from, to].
std::optional<BoxSummary> log1p_distribution_summary(std::span<const MobilityRecord> records,
                                                     Date from, Date to);

// CSV stores (see docs/formats.md).
void write_records_csv(std::ostream& out, std::span<const MobilityRecord> records);
std::vector<MobilityRecord> read_records_csv(const std::string& path);
void write_series_csv(std::ostream& out, const RegionSeriesSet& series);
RegionSeriesSet read_series_csv(const std::string& path);

}  // namespace smi::mobility

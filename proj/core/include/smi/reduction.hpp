#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smi/mobility.hpp"
#include "smi/parallel.hpp"
#include "smi/time.hpp"

namespace smi::reduction {

using mobility::MobilityRecord;
using mobility::RegionSeries;
using mobility::RegionSeriesSet;

// Inclusive calendar range.
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return first <= d && d <= last; }
};

// before = [start, split), after = [split, end], seasonal baseline = after
// shifted back by `seasonal_shift_years`.
//
// Weekly periods are keyed by their Monday. A week belongs to `after` (or the
// seasonal window) when its Monday lies inside that range, and to `before`
// when its Monday precedes the split and the week overlaps [start, split).
class PeriodSplit {
 public:
  // Throws ConfigError unless start < split <= end and shift >= 1.
  PeriodSplit(Date start, Date split, Date end, int seasonal_shift_years = 1);

  DateRange before() const { return {start_, split_ - std::chrono::days{1}}; }
  DateRange after() const { return {split_, end_}; }
  DateRange seasonal() const;

  bool week_in_before(Date monday) const;
  bool week_in_after(Date monday) const;
  bool week_in_seasonal(Date monday) const;

  Date start() const { return start_; }
  Date split() const { return split_; }
  Date end() const { return end_; }
  int seasonal_shift_years() const { return shift_; }

 private:
  Date start_, split_, end_;
  int shift_;
};

// 1 - after/before. Missing when before is not a positive finite number.
std::optional<double> group_reduction(double before_mean, double after_mean);

// Mean of a region's weekly means over the weeks selected by `in_period`.
template <class Pred>
std::optional<double> period_mean(const RegionSeries& series, Pred in_period) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [week, stats] : series.periods) {
    if (in_period(week)) {
      sum += stats.mean_km;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

struct UserReduction {
  std::string user_id;
  double before_mean_km = 0;
  double after_mean_km = 0;
  double reduction = 0;
};

struct UserReductionSet {
  std::vector<UserReduction> users;     // sorted by user_id
  std::size_t zero_baseline = 0;        // eligible by check-ins but before mean 0
  std::optional<double> median;         // average of the middle pair for even n
  std::optional<double> fully_reduced;  // fraction with reduction exactly 1

  std::size_t active_users() const { return users.size(); }
};

// Per-user reductions from weekly records. A user's period mean is the mean
// of their weekly indices in that period; users need `min_checkins` events
// summed over those weeks in both periods.
UserReductionSet user_reductions(std::span<const MobilityRecord> records, const PeriodSplit& split,
                                 int min_checkins = 2);

// As user_reductions, with the seasonal window as the baseline period.
UserReductionSet seasonal_reductions(std::span<const MobilityRecord> records,
                                     const PeriodSplit& split, int min_checkins = 2);

struct ReductionReport {
  std::string region_id;
  std::optional<double> before_mean_km;
  std::optional<double> after_mean_km;
  std::optional<double> group_reduction;
  std::optional<double> median_user_reduction;
  std::optional<double> median_seasonal_reduction;
  std::size_t active_users = 0;
  std::optional<double> fully_reduced_fraction;
  std::optional<int> rank;
};

// One report per series entry. `records` carry region_id; each region's
// user statistics use only its own records.
std::vector<ReductionReport> build_reports(const RegionSeriesSet& series,
                                           std::span<const MobilityRecord> records,
                                           const PeriodSplit& split, int min_checkins = 2,
                                           const WorkerPool& pool = WorkerPool{1});

// Sorts by group reduction descending, ties by region_id ascending, and
// numbers the ranked rows 1..N. Rows without a reduction go last, unranked.
std::vector<ReductionReport> rank_regions(std::vector<ReductionReport> reports);

struct LargestDrop {
  std::string region_id;
  Date week;    // the week whose mean fell the most from the previous week
  double drop;  // previous mean minus this week's mean
};

// Week-over-week decreases are taken between consecutive weeks present in
// the series. Ties go to the earliest week. Regions with fewer than two weeks
// are skipped.
std::vector<LargestDrop> largest_drop_week(const RegionSeriesSet& series);

// Fraction of the given regions whose largest drop falls on each week.
std::map<Date, double> drop_week_fractions(std::span<const LargestDrop> drops);

}  // namespace smi::reduction

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smi/mobility.hpp"
#include "smi/parallel.hpp"
#include "smi/time.hpp"

namespace smi::changepoint {

// Gap-free daily values. Days missing from the source are forward-filled
// from the previous day and flagged.
struct DailySeries {
  std::string region_id;
  Date first{};
  std::vector<double> values;
  std::vector<bool> filled;

  std::size_t size() const { return values.size(); }
  Date date_at(std::size_t i) const { return first + std::chrono::days{static_cast<long>(i)}; }
  Date last() const { return date_at(values.size() - 1); }
};

DailySeries make_daily_series(std::string region_id, const std::map<Date, double>& points);
DailySeries make_daily_series(const mobility::RegionSeries& series);

struct Segmentation {
  std::vector<std::size_t> breakpoints;  // index of the first point of each new segment
  double cost = 0;                       // sum of segment costs plus penalty per breakpoint
};

// Sum of squared deviations from the mean over x[begin, end).
double segment_cost(std::span<const double> x, std::size_t begin, std::size_t end);

// Exact minimiser of sum(segment_cost) + penalty * breakpoints by pruned
// dynamic programming. Among equal-cost segmentations the one whose last
// segment starts earliest wins, recursively.
Segmentation pelt_l2(std::span<const double> x, double penalty);

// 2 * s^2 * ln(n), with s^2 estimated from first differences as
// sum((x[i+1]-x[i])^2) / (2(n-1)).
double default_penalty(std::span<const double> x);

struct ChangePointResult {
  std::string region_id;
  std::vector<Date> breakpoints;  // first day of each new segment
  double penalty = 0;
  double cost_total = 0;
};

// Throws DataError for series shorter than 4 days. Without a penalty the
// default above is used.
ChangePointResult detect_changepoints(const DailySeries& series,
                                      std::optional<double> penalty = std::nullopt);

std::vector<ChangePointResult> detect_all(std::span<const DailySeries> series,
                                          std::optional<double> penalty,
                                          const WorkerPool& pool = WorkerPool{1});

struct Attribution {
  std::size_t in_window = 0;
  std::size_t total = 0;    // breakpoints in the national date's year
  std::size_t regions = 0;  // regions with at least one such breakpoint
  std::optional<double> fraction;
};

// Counts breakpoints in the national date's calendar year that fall strictly
// after national_date and strictly before the region's own policy date (no
// policy date: no upper bound). Regions without breakpoints that year do
// not enter the denominator.
Attribution attribute_changepoints(std::span<const ChangePointResult> results, Date national_date,
                                   const std::map<std::string, Date, std::less<>>& policy_dates);

// Population variance of the trailing `window`-point means divided by the
// population variance of the series. Zero when the series is constant.
// Throws std::invalid_argument when the series is shorter than the window.
double stationarity_score(std::span<const double> x, std::size_t window = 7);

// Whether the days strictly before policy_date score lower than the whole
// series. Missing when the policy date is outside the series or fewer than
// `window` days precede it.
std::optional<bool> compare_stationarity(const DailySeries& series, Date policy_date,
                                         std::size_t window = 7);

}  // namespace smi::changepoint

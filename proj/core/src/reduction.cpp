#include "smi/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "smi/error.hpp"
#include "smi/stats.hpp"

namespace smi::reduction {

namespace {

using std::chrono::days;

struct PeriodAccumulator {
  double index_sum = 0;
  std::size_t weeks = 0;
  long long checkins = 0;
};

template <class InBase, class InAfter>
UserReductionSet reductions(std::span<const MobilityRecord> records, int min_checkins,
                            InBase in_base, InAfter in_after) {
  std::map<std::string_view, std::pair<PeriodAccumulator, PeriodAccumulator>> per_user;
  for (const MobilityRecord& r : records) {
    const bool base = in_base(r.period);
    const bool after = in_after(r.period);
    if (!base && !after) continue;
    auto& acc = per_user[r.user_id];
    PeriodAccumulator& target = base ? acc.first : acc.second;
    target.index_sum += r.index_km;
    ++target.weeks;
    target.checkins += r.checkins;
  }
  UserReductionSet out;
  std::size_t full = 0;
  std::vector<double> values;
  for (const auto& [user, acc] : per_user) {
    if (acc.first.checkins < min_checkins || acc.second.checkins < min_checkins) continue;
    const double before = acc.first.index_sum / static_cast<double>(acc.first.weeks);
    const double after = acc.second.index_sum / static_cast<double>(acc.second.weeks);
    const auto red = group_reduction(before, after);
    if (!red) {
      ++out.zero_baseline;
      continue;
    }
    out.users.push_back({std::string(user), before, after, *red});
    values.push_back(*red);
    if (*red == 1.0) ++full;
  }
  out.median = median(std::move(values));
  if (!out.users.empty()) {
    out.fully_reduced = static_cast<double>(full) / static_cast<double>(out.users.size());
  }
  return out;
}

}  // namespace

PeriodSplit::PeriodSplit(Date start, Date split, Date end, int seasonal_shift_years)
    : start_(start), split_(split), end_(end), shift_(seasonal_shift_years) {
  if (!(start_ < split_)) throw ConfigError("period start must precede the split date");
  if (!(split_ <= end_)) throw ConfigError("split date must not follow the end date");
  if (shift_ < 1) throw ConfigError("seasonal shift must be at least one year");
}

DateRange PeriodSplit::seasonal() const {
  return {shift_years(split_, -shift_), shift_years(end_, -shift_)};
}

bool PeriodSplit::week_in_before(Date monday) const {
  return monday < split_ && monday + days{6} >= start_;
}

bool PeriodSplit::week_in_after(Date monday) const { return after().contains(monday); }

bool PeriodSplit::week_in_seasonal(Date monday) const { return seasonal().contains(monday); }

std::optional<double> group_reduction(double before_mean, double after_mean) {
  if (!std::isfinite(before_mean) || !std::isfinite(after_mean) || !(before_mean > 0)) {
    return std::nullopt;
  }
  return 1.0 - after_mean / before_mean;
}

UserReductionSet user_reductions(std::span<const MobilityRecord> records, const PeriodSplit& split,
                                 int min_checkins) {
  return reductions(
      records, min_checkins, [&](Date w) { return split.week_in_before(w); },
      [&](Date w) { return split.week_in_after(w); });
}

UserReductionSet seasonal_reductions(std::span<const MobilityRecord> records,
                                     const PeriodSplit& split, int min_checkins) {
  return reductions(
      records, min_checkins, [&](Date w) { return split.week_in_seasonal(w); },
      [&](Date w) { return split.week_in_after(w); });
}

std::vector<ReductionReport> build_reports(const RegionSeriesSet& series,
                                           std::span<const MobilityRecord> records,
                                           const PeriodSplit& split, int min_checkins,
                                           const WorkerPool& pool) {
  std::vector<const RegionSeries*> regions;
  for (const auto& [id, s] : series) regions.push_back(&s);

  std::map<std::string_view, std::vector<MobilityRecord>> by_region;
  for (const auto& [id, s] : series) by_region[id];
  for (const MobilityRecord& r : records) {
    auto it = by_region.find(r.region_id);
    if (it != by_region.end()) it->second.push_back(r);
  }

  std::vector<ReductionReport> reports(regions.size());
  pool.parallel_for(regions.size(), [&](std::size_t i) {
    const RegionSeries& s = *regions[i];
    ReductionReport& rep = reports[i];
    rep.region_id = s.region_id;
    rep.before_mean_km = period_mean(s, [&](Date w) { return split.week_in_before(w); });
    rep.after_mean_km = period_mean(s, [&](Date w) { return split.week_in_after(w); });
    if (rep.before_mean_km && rep.after_mean_km) {
      rep.group_reduction = group_reduction(*rep.before_mean_km, *rep.after_mean_km);
    }
    const auto& recs = by_region.at(s.region_id);
    const UserReductionSet users = user_reductions(recs, split, min_checkins);
    rep.median_user_reduction = users.median;
    rep.active_users = users.active_users();
    rep.fully_reduced_fraction = users.fully_reduced;
    rep.median_seasonal_reduction = seasonal_reductions(recs, split, min_checkins).median;
  });
  return reports;
}

std::vector<ReductionReport> rank_regions(std::vector<ReductionReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const ReductionReport& a, const ReductionReport& b) {
                     if (a.group_reduction.has_value() != b.group_reduction.has_value()) {
                       return a.group_reduction.has_value();
                     }
                     if (a.group_reduction && *a.group_reduction != *b.group_reduction) {
                       return *a.group_reduction > *b.group_reduction;
                     }
                     return a.region_id < b.region_id;
                   });
  int rank = 0;
  for (ReductionReport& r : reports) {
    if (r.group_reduction) {
      r.rank = ++rank;
    } else {
      r.rank.reset();
    }
  }
  return reports;
}

std::vector<LargestDrop> largest_drop_week(const RegionSeriesSet& series) {
  std::vector<LargestDrop> out;
  for (const auto& [id, s] : series) {
    if (s.periods.size() < 2) continue;
    std::optional<LargestDrop> best;
    auto prev = s.periods.begin();
    for (auto it = std::next(prev); it != s.periods.end(); prev = it, ++it) {
      const double drop = prev->second.mean_km - it->second.mean_km;
      if (!best || drop > best->drop) best = LargestDrop{id, it->first, drop};
    }
    out.push_back(*best);
  }
  return out;
}

std::map<Date, double> drop_week_fractions(std::span<const LargestDrop> drops) {
  std::map<Date, double> out;
  if (drops.empty()) return out;
  for (const LargestDrop& d : drops) out[d.week] += 1.0;
  for (auto& [week, v] : out) v /= static_cast<double>(drops.size());
  return out;
}

}  // namespace smi::reduction

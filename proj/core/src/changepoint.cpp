#include "smi/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smi/error.hpp"
#include "smi/stats.hpp"

namespace smi::changepoint {

namespace {

// Prefix sums of the mean-centred series; centring keeps S2 - S1^2/n well
// conditioned for series with a large offset.
struct Prefix {
  std::vector<long double> s1, s2;

  explicit Prefix(std::span<const double> x) : s1(x.size() + 1, 0), s2(x.size() + 1, 0) {
    long double m = 0;
    for (double v : x) m += v;
    if (!x.empty()) m /= static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double d = x[i] - m;
      s1[i + 1] = s1[i] + d;
      s2[i + 1] = s2[i] + d * d;
    }
  }

  double cost(std::size_t a, std::size_t b) const {
    const long double n = static_cast<long double>(b - a);
    const long double sum = s1[b] - s1[a];
    const long double c = (s2[b] - s2[a]) - sum * sum / n;
    return c > 0 ? static_cast<double>(c) : 0.0;
  }
};

}  // namespace

DailySeries make_daily_series(std::string region_id, const std::map<Date, double>& points) {
  DailySeries out;
  out.region_id = std::move(region_id);
  if (points.empty()) return out;
  out.first = points.begin()->first;
  const Date last = points.rbegin()->first;
  double carry = points.begin()->second;
  for (Date d = out.first; d <= last; d += std::chrono::days{1}) {
    auto it = points.find(d);
    if (it != points.end()) {
      carry = it->second;
      out.values.push_back(carry);
      out.filled.push_back(false);
    } else {
      out.values.push_back(carry);
      out.filled.push_back(true);
    }
  }
  return out;
}

DailySeries make_daily_series(const mobility::RegionSeries& series) {
  std::map<Date, double> points;
  for (const auto& [d, stats] : series.periods) points[d] = stats.mean_km;
  return make_daily_series(series.region_id, points);
}

double segment_cost(std::span<const double> x, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0;
  std::vector<double> seg(x.begin() + static_cast<std::ptrdiff_t>(begin),
                          x.begin() + static_cast<std::ptrdiff_t>(end));
  const double m = mean(seg);
  double c = 0;
  for (double v : seg) c += (v - m) * (v - m);
  return c;
}

Segmentation pelt_l2(std::span<const double> x, double penalty) {
  if (!(penalty >= 0) || !std::isfinite(penalty)) {
    throw std::invalid_argument("penalty must be a finite non-negative number");
  }
  const std::size_t n = x.size();
  Segmentation out;
  if (n == 0) return out;
  const Prefix prefix(x);

  std::vector<double> best(n + 1, 0);
  std::vector<std::size_t> last_start(n + 1, 0);
  best[0] = -penalty;
  std::vector<std::size_t> candidates{0};
  std::vector<double> totals;
  for (std::size_t t = 1; t <= n; ++t) {
    totals.resize(candidates.size());
    double f = 0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const std::size_t tau = candidates[k];
      totals[k] = best[tau] + prefix.cost(tau, t) + penalty;
      if (k == 0 || totals[k] < f) {
        f = totals[k];
        arg = tau;
      }
    }
    best[t] = f;
    last_start[t] = arg;
    // A candidate whose unpenalised total already exceeds the optimum can
    // never become optimal later. The slack guards against rounding.
    const double slack = 1e-9 * (std::abs(f) + penalty + 1.0);
    std::size_t kept = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (totals[k] - penalty <= f + slack) candidates[kept++] = candidates[k];
    }
    candidates.resize(kept);
    candidates.push_back(t);
  }

  for (std::size_t t = last_start[n]; t > 0; t = last_start[t]) out.breakpoints.push_back(t);
  std::reverse(out.breakpoints.begin(), out.breakpoints.end());
  out.cost = best[n];
  return out;
}

double default_penalty(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0;
  double ss = 0;
  for (std::size_t i = 1; i < n; ++i) ss += (x[i] - x[i - 1]) * (x[i] - x[i - 1]);
  const double sigma2 = ss / (2.0 * static_cast<double>(n - 1));
  return 2.0 * sigma2 * std::log(static_cast<double>(n));
}

ChangePointResult detect_changepoints(const DailySeries& series, std::optional<double> penalty) {
  if (series.size() < 4) {
    throw DataError("change-point detection needs at least 4 days for region '" +
                    series.region_id + "'");
  }
  ChangePointResult out;
  out.region_id = series.region_id;
  out.penalty = penalty ? *penalty : default_penalty(series.values);
  const Segmentation seg = pelt_l2(series.values, out.penalty);
  for (std::size_t b : seg.breakpoints) out.breakpoints.push_back(series.date_at(b));
  out.cost_total = seg.cost;
  return out;
}

std::vector<ChangePointResult> detect_all(std::span<const DailySeries> series,
                                          std::optional<double> penalty, const WorkerPool& pool) {
  std::vector<ChangePointResult> out(series.size());
  pool.parallel_for(series.size(), [&](std::size_t i) { out[i] = detect_changepoints(series[i], penalty); });
  return out;
}

Attribution attribute_changepoints(std::span<const ChangePointResult> results, Date national_date,
                                   const std::map<std::string, Date, std::less<>>& policy_dates) {
  Attribution a;
  const int year = year_of(national_date);
  for (const ChangePointResult& r : results) {
    auto policy = policy_dates.find(r.region_id);
    std::size_t counted = 0;
    for (Date b : r.breakpoints) {
      if (year_of(b) != year) continue;
      ++counted;
      if (b > national_date && (policy == policy_dates.end() || b < policy->second)) ++a.in_window;
    }
    if (counted > 0) ++a.regions;
    a.total += counted;
  }
  if (a.total > 0) a.fraction = static_cast<double>(a.in_window) / static_cast<double>(a.total);
  return a;
}

double stationarity_score(std::span<const double> x, std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  if (x.size() < window) throw std::invalid_argument("series shorter than the rolling window");
  const double total = population_variance(x);
  if (total == 0) return 0;
  std::vector<double> means;
  means.reserve(x.size() - window + 1);
  for (std::size_t i = 0; i + window <= x.size(); ++i) {
    means.push_back(mean(x.subspan(i, window)));
  }
  return population_variance(means) / total;
}

std::optional<bool> compare_stationarity(const DailySeries& series, Date policy_date,
                                         std::size_t window) {
  if (series.size() < window || policy_date < series.first || policy_date > series.last()) {
    return std::nullopt;
  }
  const auto before = static_cast<std::size_t>((policy_date - series.first).count());
  if (before < window) return std::nullopt;
  const std::span<const double> all(series.values);
  return stationarity_score(all.first(before), window) < stationarity_score(all, window);
}

}  // namespace smi::changepoint

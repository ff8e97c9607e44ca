#include "smi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smi {

void ExactSum::add(double x) {
  std::size_t used = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[used++] = lo;
    x = hi;
  }
  partials_.resize(used);
  partials_.push_back(x);
}

void ExactSum::add_product(double a, double b) {
  const double p = a * b;
  add(p);
  add(std::fma(a, b, -p));
}

void ExactSum::merge(const ExactSum& other) {
  for (double p : other.partials_) add(p);
}

// Final rounding follows the round-half-even correction used by Python's
// math.fsum so that the result is the correctly rounded exact sum.
double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

void RunningStats::add(double x) {
  ++count_;
  sum_.add(x);
  sum_sq_.add_product(x, x);
}

void RunningStats::merge(const RunningStats& other) {
  count_ += other.count_;
  sum_.merge(other.sum_);
  sum_sq_.merge(other.sum_sq_);
}

double RunningStats::mean() const {
  return count_ == 0 ? 0.0 : sum_.value() / static_cast<double>(count_);
}

double RunningStats::m2() const {
  if (count_ == 0) return 0.0;
  // n * m2 = n * sum(x^2) - sum(x)^2, accumulated exactly from the partials
  const double n = static_cast<double>(count_);
  ExactSum acc;
  for (double q : sum_sq_.partials()) acc.add_product(q, n);
  for (double a : sum_.partials()) {
    for (double b : sum_.partials()) acc.add_product(-a, b);
  }
  const double m2 = acc.value() / n;
  return m2 > 0.0 ? m2 : 0.0;
}

double RunningStats::variance() const {
  return count_ == 0 ? 0.0 : m2() / static_cast<double>(count_);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  return std::sqrt(population_variance(values));
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty input");
  if (p <= 0.0) return sorted.front();
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::min(rank, sorted.size()) - 1];
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  // Bisection on the CDF expressed through erfc; 200 halvings reach the
  // resolution of double on [-40, 40].
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
    if (hi - lo <= 0.0) break;
  }
  return 0.5 * (lo + hi);
}

std::optional<BoxSummary> box_summary(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  BoxSummary box;
  box.n = values.size();
  box.min = values.front();
  box.q1 = nearest_rank(values, 0.25);
  box.median = nearest_rank(values, 0.5);
  box.q3 = nearest_rank(values, 0.75);
  box.max = values.back();
  return box;
}

}  // namespace smi

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace smi {

// Exact floating-point accumulator (Shewchuk non-overlapping partials).
// value() is the correctly rounded sum, so it depends only on the multiset
// of inputs and never on the order or grouping they were added in.
class ExactSum {
 public:
  void add(double x);
  void add_product(double a, double b);  // adds a*b exactly
  void merge(const ExactSum& other);
  double value() const;
  // Non-overlapping terms whose exact sum is the accumulated value.
  const std::vector<double>& partials() const { return partials_; }

 private:
  std::vector<double> partials_;
};

// Count / sum / sum-of-squares accumulator with an exact associative merge.
// Splitting a data set into any partition, accumulating each part and merging
// yields bit-identical moments to a single pass.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return count_; }
  double sum() const { return sum_.value(); }
  double mean() const;
  double m2() const;        // sum of squared deviations from the mean
  double variance() const;  // population variance, m2 / n

 private:
  std::size_t count_ = 0;
  ExactSum sum_;
  ExactSum sum_sq_;
};

double mean(std::span<const double> values);
// Population (divide-by-n) variance and standard deviation, two-pass.
double population_variance(std::span<const double> values);
double population_stddev(std::span<const double> values);

// Median with the usual average-of-middle-pair convention for even n.
std::optional<double> median(std::vector<double> values);

// Nearest-rank quantile on sorted data: element ceil(p*n)-1, p in [0,1].
double nearest_rank(std::span<const double> sorted, double p);

// Inverse of the standard normal CDF.
double normal_quantile(double p);

struct BoxSummary {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Box-plot statistics using the nearest-rank convention.
std::optional<BoxSummary> box_summary(std::vector<double> values);

}  // namespace smi

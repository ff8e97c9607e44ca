#pragma once

// Independent reference implementations used only by tests. They favour
// directness over speed and share no code with the library.

#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

struct LatLon {
  double lat;
  double lon;
};

// Vincenty's inverse formula on WGS-84 in long double. Not for
// near-antipodal pairs.
long double vincenty_m(double lat1, double lon1, double lat2, double lon2);

// Normalised mean of unit vectors, in long double.
LatLon vector_mean_centroid(const std::vector<LatLon>& pts);

// Population standard deviation of Vincenty distances (km) to the centroid.
long double dispersion_km(const std::vector<LatLon>& pts);

// Plain O(n^2) optimal partitioning with segment costs recomputed from
// scratch. Ties go to the earliest last-segment start.
struct Segmentation {
  std::vector<std::size_t> breakpoints;
  long double cost = 0;
};
Segmentation segmentation_dp(const std::vector<double>& x, double penalty);

// Every one of the 2^(n-1) segmentations; n <= 16.
Segmentation segmentation_enumerate(const std::vector<double>& x, double penalty);

long double segment_cost(const std::vector<double>& x, std::size_t begin, std::size_t end);

// Element at 1-based rank ceil(num/den * n).
double nearest_rank(std::vector<double> values, long num, long den);

long double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct Moments {
  long double mean = 0;
  long double variance = 0;
  std::size_t count = 0;
};

// (key) -> two-pass mean and population variance.
template <class Key>
std::map<Key, Moments> group_by(const std::vector<std::pair<Key, double>>& rows) {
  std::map<Key, std::vector<double>> groups;
  for (const auto& [k, v] : rows) groups[k].push_back(v);
  std::map<Key, Moments> out;
  for (const auto& [k, vs] : groups) {
    long double s = 0;
    for (double v : vs) s += v;
    const long double m = s / vs.size();
    long double ss = 0;
    for (double v : vs) ss += (v - m) * (v - m);
    out[k] = {m, ss / vs.size(), vs.size()};
  }
  return out;
}

}  // namespace oracle

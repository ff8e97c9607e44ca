#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smi/geo.hpp"

namespace smi::geo {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
// Below this norm the mean direction is numerically meaningless.
constexpr double kDegenerateNorm = 1e-12;
}  // namespace

Centroid centroid(std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("centroid of an empty point set");
  const Point& first = points.front();
  if (std::all_of(points.begin(), points.end(), [&](const Point& p) { return p == first; })) {
    return {first, false};
  }
  double x = 0, y = 0, z = 0;
  for (const Point& p : points) {
    const double lat = p.latitude * kDeg, lon = p.longitude * kDeg;
    x += std::cos(lat) * std::cos(lon);
    y += std::cos(lat) * std::sin(lon);
    z += std::sin(lat);
  }
  const double n = static_cast<double>(points.size());
  x /= n;
  y /= n;
  z /= n;
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (norm < kDegenerateNorm) return {first, true};
  Point c;
  c.latitude = std::atan2(z, std::hypot(x, y)) / kDeg;
  c.longitude = std::atan2(y, x) / kDeg;
  return {c, false};
}

}  // namespace smi::geo

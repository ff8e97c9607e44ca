#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;
constexpr long double kA = 6378137.0L;
constexpr long double kF = 1.0L / 298.257223563L;
constexpr long double kB = kA * (1 - kF);

long double rad(long double deg) { return deg * kPi / 180; }

}  // namespace

long double vincenty_m(double lat1, double lon1, double lat2, double lon2) {
  const long double L = rad(static_cast<long double>(lon2) - lon1);
  const long double U1 = std::atan((1 - kF) * std::tan(rad(lat1)));
  const long double U2 = std::atan((1 - kF) * std::tan(rad(lat2)));
  const long double sinU1 = std::sin(U1), cosU1 = std::cos(U1);
  const long double sinU2 = std::sin(U2), cosU2 = std::cos(U2);
  long double lambda = L, sin_sigma = 0, cos_sigma = 0, sigma = 0, cos2_alpha = 0, cos2sm = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    const long double sl = std::sin(lambda), cl = std::cos(lambda);
    sin_sigma = std::sqrt((cosU2 * sl) * (cosU2 * sl) +
                          (cosU1 * sinU2 - sinU1 * cosU2 * cl) * (cosU1 * sinU2 - sinU1 * cosU2 * cl));
    if (sin_sigma == 0) return 0;
    cos_sigma = sinU1 * sinU2 + cosU1 * cosU2 * cl;
    sigma = std::atan2(sin_sigma, cos_sigma);
    const long double sin_alpha = cosU1 * cosU2 * sl / sin_sigma;
    cos2_alpha = 1 - sin_alpha * sin_alpha;
    cos2sm = cos2_alpha != 0 ? cos_sigma - 2 * sinU1 * sinU2 / cos2_alpha : 0;
    const long double C = kF / 16 * cos2_alpha * (4 + kF * (4 - 3 * cos2_alpha));
    const long double next =
        L + (1 - C) * kF * sin_alpha *
                (sigma + C * sin_sigma * (cos2sm + C * cos_sigma * (-1 + 2 * cos2sm * cos2sm)));
    if (std::abs(next - lambda) < 1e-17L) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  const long double u2 = cos2_alpha * (kA * kA - kB * kB) / (kB * kB);
  const long double A = 1 + u2 / 16384 * (4096 + u2 * (-768 + u2 * (320 - 175 * u2)));
  const long double B = u2 / 1024 * (256 + u2 * (-128 + u2 * (74 - 47 * u2)));
  const long double ds =
      B * sin_sigma *
      (cos2sm + B / 4 *
                    (cos_sigma * (-1 + 2 * cos2sm * cos2sm) -
                     B / 6 * cos2sm * (-3 + 4 * sin_sigma * sin_sigma) * (-3 + 4 * cos2sm * cos2sm)));
  return kB * A * (sigma - ds);
}

LatLon vector_mean_centroid(const std::vector<LatLon>& pts) {
  long double x = 0, y = 0, z = 0;
  for (const LatLon& p : pts) {
    x += std::cos(rad(p.lat)) * std::cos(rad(p.lon));
    y += std::cos(rad(p.lat)) * std::sin(rad(p.lon));
    z += std::sin(rad(p.lat));
  }
  const long double h = std::hypot(x, y);
  return {static_cast<double>(std::atan2(z, h) * 180 / kPi),
          static_cast<double>(std::atan2(y, x) * 180 / kPi)};
}

long double dispersion_km(const std::vector<LatLon>& pts) {
  const LatLon c = vector_mean_centroid(pts);
  std::vector<long double> d;
  for (const LatLon& p : pts) d.push_back(vincenty_m(p.lat, p.lon, c.lat, c.lon) / 1000);
  long double m = 0;
  for (long double v : d) m += v;
  m /= d.size();
  long double ss = 0;
  for (long double v : d) ss += (v - m) * (v - m);
  return std::sqrt(ss / d.size());
}

long double segment_cost(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  long double m = 0;
  for (std::size_t i = begin; i < end; ++i) m += x[i];
  m /= (end - begin);
  long double c = 0;
  for (std::size_t i = begin; i < end; ++i) c += (x[i] - m) * (x[i] - m);
  return c;
}

Segmentation segmentation_dp(const std::vector<double>& x, double penalty) {
  const std::size_t n = x.size();
  std::vector<long double> F(n + 1, 0);
  std::vector<std::size_t> prev(n + 1, 0);
  F[0] = -static_cast<long double>(penalty);
  for (std::size_t t = 1; t <= n; ++t) {
    F[t] = std::numeric_limits<long double>::infinity();
    for (std::size_t s = 0; s < t; ++s) {
      const long double v = F[s] + segment_cost(x, s, t) + penalty;
      if (v < F[t]) {
        F[t] = v;
        prev[t] = s;
      }
    }
  }
  Segmentation out;
  for (std::size_t t = prev[n]; t > 0; t = prev[t]) out.breakpoints.push_back(t);
  std::reverse(out.breakpoints.begin(), out.breakpoints.end());
  out.cost = n ? F[n] : 0;
  return out;
}

Segmentation segmentation_enumerate(const std::vector<double>& x, double penalty) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n > 16) throw std::invalid_argument("too long to enumerate");
  Segmentation best;
  best.cost = std::numeric_limits<long double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<std::size_t> bps;
    for (std::size_t i = 1; i < n; ++i) {
      if (mask & (1ul << (i - 1))) bps.push_back(i);
    }
    long double cost = penalty * static_cast<long double>(bps.size());
    std::size_t begin = 0;
    for (std::size_t b : bps) {
      cost += segment_cost(x, begin, b);
      begin = b;
    }
    cost += segment_cost(x, begin, n);
    if (cost < best.cost) best = {bps, cost};
  }
  return best;
}

double nearest_rank(std::vector<double> values, long num, long den) {
  std::sort(values.begin(), values.end());
  const long n = static_cast<long>(values.size());
  long rank = (num * n + den - 1) / den;  // ceil(num/den * n)
  rank = std::clamp(rank, 1L, n);
  return values[static_cast<std::size_t>(rank - 1)];
}

long double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle

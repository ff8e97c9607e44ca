#include "smi/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace smi::geo {

namespace {

constexpr int kOrder = 6;  // nA1 = nC1 = nA2 = nC2 = nA3 = nC3
constexpr double kPi = std::numbers::pi;
constexpr double kDegree = kPi / 180.0;
constexpr int kDigits = std::numeric_limits<double>::digits;
constexpr int kMaxit1 = 20;
constexpr int kMaxit2 = kMaxit1 + kDigits + 10;

const double kTiny = std::sqrt(std::numeric_limits<double>::min());
constexpr double kTol0 = std::numeric_limits<double>::epsilon();
constexpr double kTol1 = 200 * kTol0;
const double kTol2 = std::sqrt(kTol0);
constexpr double kTolb = kTol0;
const double kXthresh = 1000 * kTol2;

inline double sq(double x) { return x * x; }

void norm2(double& s, double& c) {
  const double r = std::hypot(s, c);
  s /= r;
  c /= r;
}

// Error-free sum: returns s = round(u + v), t = (u + v) - s.
double sum_err(double u, double v, double& t) {
  const double s = u + v;
  const double up = s - v - u;
  const double vpp = s - (s - v) - v;
  t = s != 0 ? 0.0 - (up + vpp) : s;
  return s;
}

double polyval(int n, const double* p, double x) {
  double y = n < 0 ? 0 : *p++;
  while (--n >= 0) y = y * x + *p++;
  return y;
}

double ang_round(double x) {
  constexpr double z = 1.0 / 16.0;
  volatile double y = std::fabs(x);
  volatile double w = z - y;
  y = w > 0 ? z - w : y;
  return std::copysign(y, x);
}

double ang_diff(double x, double y, double& e) {
  double t;
  double d = sum_err(std::remainder(-x, 360.0), std::remainder(y, 360.0), t);
  d = sum_err(std::remainder(d, 360.0), t, t);
  if (d == 0 || std::fabs(d) == 180) d = std::copysign(d, t == 0 ? y - x : -t);
  e = t;
  return d;
}

void rotate_quadrant(int q, double& s, double& c) {
  const double s0 = s, c0 = c;
  switch (static_cast<unsigned>(q) & 3U) {
    case 0U: s = s0; c = c0; break;
    case 1U: s = c0; c = -s0; break;
    case 2U: s = -s0; c = -c0; break;
    default: s = -c0; c = s0; break;
  }
}

void sincosd(double x, double& sinx, double& cosx) {
  int q = 0;
  double r = std::remquo(x, 90.0, &q);
  r *= kDegree;
  sinx = std::sin(r);
  cosx = std::cos(r);
  rotate_quadrant(q, sinx, cosx);
  cosx += 0.0;
  if (sinx == 0) sinx = std::copysign(sinx, x);
}

// sin and cos of (x + t) degrees, x in [-180, 180], t a small correction.
void sincosde(double x, double t, double& sinx, double& cosx) {
  int q = 0;
  double r = std::remquo(x, 90.0, &q);
  r = ang_round(r + t) * kDegree;
  sinx = std::sin(r);
  cosx = std::cos(r);
  rotate_quadrant(q, sinx, cosx);
  cosx += 0.0;
  if (sinx == 0) sinx = std::copysign(sinx, x);
}

double sin_cos_series(bool sinp, double sinx, double cosx, const double c[], int n) {
  // c[0..n] (sinp) or c[0..n-1]; Clenshaw summation from the top.
  c += (n + sinp);
  const double ar = 2 * (cosx - sinx) * (cosx + sinx);
  double y0 = (n & 1) ? *--c : 0, y1 = 0;
  n /= 2;
  while (n--) {
    y1 = ar * y0 - y1 + *--c;
    y0 = ar * y1 - y0 + *--c;
  }
  return sinp ? 2 * sinx * cosx * y0 : cosx * (y0 - y1);
}

double astroid(double x, double y) {
  const double p = sq(x), q = sq(y), r = (p + q - 1) / 6;
  if (q == 0 && r <= 0) return 0;
  const double S = p * q / 4, r2 = sq(r), r3 = r * r2, disc = S * (S + 2 * r3);
  double u = r;
  if (disc >= 0) {
    double T3 = S + r3;
    T3 += T3 < 0 ? -std::sqrt(disc) : std::sqrt(disc);
    const double T = std::cbrt(T3);
    u += T + (T != 0 ? r2 / T : 0);
  } else {
    const double ang = std::atan2(std::sqrt(-disc), -(S + r3));
    u += 2 * r * std::cos(ang / 3);
  }
  const double v = std::sqrt(sq(u) + q);
  const double uv = u < 0 ? q / (v - u) : u + v;
  const double w = (uv - q) / (2 * v);
  return uv / (std::sqrt(uv + sq(w)) + w);
}

double a1m1f(double eps) {
  static constexpr double coeff[] = {1, 4, 64, 0, 256};
  constexpr int m = kOrder / 2;
  const double t = polyval(m, coeff, sq(eps)) / coeff[m + 1];
  return (t + eps) / (1 - eps);
}

void c1f(double eps, double c[]) {
  static constexpr double coeff[] = {
      -1, 6, -16, 32,  //
      -9, 64, -128, 2048,
      9, -16, 768,
      3, -5, 512,
      -7, 1280,
      -7, 2048,
  };
  const double eps2 = sq(eps);
  double d = eps;
  int o = 0;
  for (int l = 1; l <= kOrder; ++l) {
    const int m = (kOrder - l) / 2;
    c[l] = d * polyval(m, coeff + o, eps2) / coeff[o + m + 1];
    o += m + 2;
    d *= eps;
  }
}

double a2m1f(double eps) {
  static constexpr double coeff[] = {-11, -28, -192, 0, 256};
  constexpr int m = kOrder / 2;
  const double t = polyval(m, coeff, sq(eps)) / coeff[m + 1];
  return (t - eps) / (1 + eps);
}

void c2f(double eps, double c[]) {
  static constexpr double coeff[] = {
      1, 2, 16, 32,  //
      35, 64, 384, 2048,
      15, 80, 768,
      7, 35, 512,
      63, 1280,
      77, 2048,
  };
  const double eps2 = sq(eps);
  double d = eps;
  int o = 0;
  for (int l = 1; l <= kOrder; ++l) {
    const int m = (kOrder - l) / 2;
    c[l] = d * polyval(m, coeff + o, eps2) / coeff[o + m + 1];
    o += m + 2;
    d *= eps;
  }
}

}  // namespace

struct Geodesic::Workspace {
  double c1a[kOrder + 1];
  double c2a[kOrder + 1];
  double c3a[kOrder];
};

Geodesic::Geodesic(double equatorial_radius_m, double flattening)
    : a_(equatorial_radius_m), f_(flattening) {
  if (!(std::isfinite(a_) && a_ > 0)) throw std::invalid_argument("equatorial radius must be positive");
  f1_ = 1 - f_;
  e2_ = f_ * (2 - f_);
  ep2_ = e2_ / sq(f1_);
  n_ = f_ / (2 - f_);
  b_ = a_ * f1_;
  if (!(std::isfinite(b_) && b_ > 0)) throw std::invalid_argument("polar semi-axis must be positive");
  if (f_ < 0 || std::fabs(n_) >= 0.1) {
    // The prolate branch of the start heuristic is not carried here.
    throw std::invalid_argument("flattening must be in [0, ~0.18)");
  }
  etol2_ = 0.1 * kTol2 / std::sqrt(std::max(0.001, std::fabs(f_)) * std::min(1.0, 1 - f_ / 2) / 2);

  static constexpr double a3coeff[] = {
      -3, 128,  //
      -2, -3, 64,
      -1, -3, -1, 16,
      3, -1, -2, 8,
      1, -1, 2,
      1, 1,
  };
  {
    int o = 0, k = 0;
    for (int j = kOrder - 1; j >= 0; --j) {
      const int m = std::min(kOrder - j - 1, j);
      a3x_[k++] = polyval(m, a3coeff + o, n_) / a3coeff[o + m + 1];
      o += m + 2;
    }
  }
  static constexpr double c3coeff[] = {
      3, 128,  //
      2, 5, 128,
      -1, 3, 3, 64,
      -1, 0, 1, 8,
      -1, 1, 4,
      5, 256,
      1, 3, 128,
      -3, -2, 3, 64,
      1, -3, 2, 32,
      7, 512,
      -10, 9, 384,
      5, -9, 5, 192,
      7, 512,
      -14, 7, 512,
      21, 2560,
  };
  {
    int o = 0, k = 0;
    for (int l = 1; l < kOrder; ++l) {
      for (int j = kOrder - 1; j >= l; --j) {
        const int m = std::min(kOrder - j - 1, j);
        c3x_[k++] = polyval(m, c3coeff + o, n_) / c3coeff[o + m + 1];
        o += m + 2;
      }
    }
  }
}

const Geodesic& Geodesic::wgs84() {
  static const Geodesic g(6378137.0, 1 / 298.257223563);
  return g;
}

double Geodesic::a3f(double eps) const { return polyval(kOrder - 1, a3x_, eps); }

void Geodesic::c3f(double eps, double c[]) const {
  double mult = 1;
  int o = 0;
  for (int l = 1; l < kOrder; ++l) {
    const int m = kOrder - l - 1;
    mult *= eps;
    c[l] = mult * polyval(m, c3x_ + o, eps);
    o += m + 1;
  }
}

void Geodesic::lengths(double eps, double sig12, double ssig1, double csig1, double dn1,
                       double ssig2, double csig2, double dn2, double* s12b, double* m12b,
                       Workspace& ws) const {
  double A1 = a1m1f(eps);
  c1f(eps, ws.c1a);
  double A2 = 0, m0 = 0, J12 = 0;
  if (m12b) {
    A2 = a2m1f(eps);
    c2f(eps, ws.c2a);
    m0 = A1 - A2;
    A2 = 1 + A2;
  }
  A1 = 1 + A1;
  const double B1 = sin_cos_series(true, ssig2, csig2, ws.c1a, kOrder) -
                    sin_cos_series(true, ssig1, csig1, ws.c1a, kOrder);
  if (s12b) *s12b = A1 * (sig12 + B1);
  if (m12b) {
    const double B2 = sin_cos_series(true, ssig2, csig2, ws.c2a, kOrder) -
                      sin_cos_series(true, ssig1, csig1, ws.c2a, kOrder);
    J12 = m0 * sig12 + (A1 * B1 - A2 * B2);
    *m12b = dn2 * (csig1 * ssig2) - dn1 * (ssig1 * csig2) - csig1 * csig2 * J12;
  }
}

double Geodesic::inverse_start(double sbet1, double cbet1, double dn1, double sbet2,
                               double cbet2, double dn2, double lam12, double slam12,
                               double clam12, double& salp1, double& calp1, double& salp2,
                               double& calp2, double& dnm) const {
  (void)dn1;
  (void)dn2;
  double sig12 = -1;
  const double sbet12 = sbet2 * cbet1 - cbet2 * sbet1;
  const double cbet12 = cbet2 * cbet1 + sbet2 * sbet1;
  double sbet12a = sbet2 * cbet1;
  sbet12a += cbet2 * sbet1;
  const bool shortline = cbet12 >= 0 && sbet12 < 0.5 && cbet2 * lam12 < 0.5;
  double somg12, comg12;
  if (shortline) {
    double sbetm2 = sq(sbet1 + sbet2);
    sbetm2 /= sbetm2 + sq(cbet1 + cbet2);
    dnm = std::sqrt(1 + ep2_ * sbetm2);
    const double omg12 = lam12 / (f1_ * dnm);
    somg12 = std::sin(omg12);
    comg12 = std::cos(omg12);
  } else {
    somg12 = slam12;
    comg12 = clam12;
  }

  salp1 = cbet2 * somg12;
  calp1 = comg12 >= 0 ? sbet12 + cbet2 * sbet1 * sq(somg12) / (1 + comg12)
                      : sbet12a - cbet2 * sbet1 * sq(somg12) / (1 - comg12);

  const double ssig12 = std::hypot(salp1, calp1);
  const double csig12 = sbet1 * sbet2 + cbet1 * cbet2 * comg12;

  if (shortline && ssig12 < etol2_) {
    salp2 = cbet1 * somg12;
    calp2 = sbet12 - cbet1 * sbet2 * (comg12 >= 0 ? sq(somg12) / (1 + comg12) : 1 - comg12);
    norm2(salp2, calp2);
    sig12 = std::atan2(ssig12, csig12);
  } else if (std::fabs(n_) > 0.1 || csig12 >= 0 ||
             ssig12 >= 6 * std::fabs(n_) * kPi * sq(cbet1)) {
    // Zeroth-order spherical approximation is adequate.
  } else {
    // Nearly antipodal: scale onto the astroid problem.
    const double lam12x = std::atan2(-slam12, -clam12);
    const double k2 = sq(sbet1) * ep2_;
    const double eps = k2 / (2 * (1 + std::sqrt(1 + k2)) + k2);
    const double lamscale = f_ * cbet1 * a3f(eps) * kPi;
    const double betscale = lamscale * cbet1;
    const double x = lam12x / lamscale;
    const double y = sbet12a / betscale;
    if (y > -kTol1 && x > -1 - kXthresh) {
      salp1 = std::min(1.0, -x);
      calp1 = -std::sqrt(1 - sq(salp1));
    } else {
      const double k = astroid(x, y);
      const double omg12a = lamscale * (-x * k / (1 + k));
      somg12 = std::sin(omg12a);
      comg12 = -std::cos(omg12a);
      salp1 = cbet2 * somg12;
      calp1 = sbet12a - cbet2 * sbet1 * sq(somg12) / (1 - comg12);
    }
  }
  if (!(salp1 <= 0)) {
    norm2(salp1, calp1);
  } else {
    salp1 = 1;
    calp1 = 0;
  }
  return sig12;
}

double Geodesic::lambda12(double sbet1, double cbet1, double dn1, double sbet2, double cbet2,
                          double dn2, double salp1, double calp1, double slam120,
                          double clam120, double& salp2, double& calp2, double& sig12,
                          double& ssig1, double& csig1, double& ssig2, double& csig2,
                          double& eps, bool diffp, double& dlam12, Workspace& ws) const {
  if (sbet1 == 0 && calp1 == 0) calp1 = -kTiny;

  const double salp0 = salp1 * cbet1;
  const double calp0 = std::hypot(calp1, salp1 * sbet1);

  ssig1 = sbet1;
  const double somg1 = salp0 * sbet1;
  csig1 = calp1 * cbet1;
  const double comg1 = csig1;
  norm2(ssig1, csig1);

  salp2 = cbet2 != cbet1 ? salp0 / cbet2 : salp1;
  calp2 = cbet2 != cbet1 || std::fabs(sbet2) != -sbet1
              ? std::sqrt(sq(calp1 * cbet1) + (cbet1 < -sbet1 ? (cbet2 - cbet1) * (cbet1 + cbet2)
                                                              : (sbet1 - sbet2) * (sbet1 + sbet2))) /
                    cbet2
              : std::fabs(calp1);
  ssig2 = sbet2;
  const double somg2 = salp0 * sbet2;
  csig2 = calp2 * cbet2;
  const double comg2 = csig2;
  norm2(ssig2, csig2);

  sig12 = std::atan2(std::max(0.0, csig1 * ssig2 - ssig1 * csig2) + 0.0,
                     csig1 * csig2 + ssig1 * ssig2);

  const double somg12 = std::max(0.0, comg1 * somg2 - somg1 * comg2) + 0.0;
  const double comg12 = comg1 * comg2 + somg1 * somg2;
  const double eta = std::atan2(somg12 * clam120 - comg12 * slam120,
                                comg12 * clam120 + somg12 * slam120);
  const double k2 = sq(calp0) * ep2_;
  eps = k2 / (2 * (1 + std::sqrt(1 + k2)) + k2);
  c3f(eps, ws.c3a);
  const double B312 = sin_cos_series(true, ssig2, csig2, ws.c3a, kOrder - 1) -
                      sin_cos_series(true, ssig1, csig1, ws.c3a, kOrder - 1);
  const double domg12 = -f_ * a3f(eps) * salp0 * (sig12 + B312);
  const double lam12 = eta + domg12;

  if (diffp) {
    if (calp2 == 0) {
      dlam12 = -2 * f1_ * dn1 / sbet1;
    } else {
      lengths(eps, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, nullptr, &dlam12, ws);
      dlam12 *= f1_ / (calp2 * cbet2);
    }
  }
  return lam12;
}

double Geodesic::inverse_m(double lat1, double lon1, double lat2, double lon2) const {
  if (std::fabs(lat1) > 90 || std::fabs(lat2) > 90) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  Workspace ws;

  double lon12s;
  double lon12 = ang_diff(lon1, lon2, lon12s);
  const double lonsign = std::signbit(lon12) ? -1 : 1;
  lon12 *= lonsign;
  lon12s *= lonsign;
  const double lam12 = lon12 * kDegree;
  double slam12, clam12;
  sincosde(lon12, lon12s, slam12, clam12);
  lon12s = (180 - lon12) - lon12s;  // supplementary longitude difference

  lat1 = ang_round(lat1);
  lat2 = ang_round(lat2);
  // Make |lat1| >= |lat2| and lat1 <= 0.
  if (std::fabs(lat1) < std::fabs(lat2)) std::swap(lat1, lat2);
  const double latsign = std::signbit(lat1) ? 1 : -1;
  lat1 *= latsign;
  lat2 *= latsign;

  double sbet1, cbet1, sbet2, cbet2;
  sincosd(lat1, sbet1, cbet1);
  sbet1 *= f1_;
  norm2(sbet1, cbet1);
  cbet1 = std::max(kTiny, cbet1);

  sincosd(lat2, sbet2, cbet2);
  sbet2 *= f1_;
  norm2(sbet2, cbet2);
  cbet2 = std::max(kTiny, cbet2);

  if (cbet1 < -sbet1) {
    if (cbet2 == cbet1) sbet2 = std::copysign(sbet1, sbet2);
  } else {
    if (std::fabs(sbet2) == -sbet1) cbet2 = cbet1;
  }

  const double dn1 = std::sqrt(1 + ep2_ * sq(sbet1));
  const double dn2 = std::sqrt(1 + ep2_ * sq(sbet2));

  double s12x = 0, m12x = 0, sig12 = 0;
  double salp1 = 0, calp1 = 0, salp2 = 0, calp2 = 0;

  bool meridian = lat1 == -90 || slam12 == 0;
  if (meridian) {
    calp1 = clam12;
    salp1 = slam12;
    calp2 = 1;
    salp2 = 0;
    const double ssig1 = sbet1, csig1 = calp1 * cbet1;
    const double ssig2 = sbet2, csig2 = calp2 * cbet2;
    sig12 = std::atan2(std::max(0.0, csig1 * ssig2 - ssig1 * csig2) + 0.0,
                       csig1 * csig2 + ssig1 * ssig2);
    lengths(n_, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, &s12x, &m12x, ws);
    if (sig12 < kTol2 || m12x >= 0) {
      if (sig12 < 3 * kTiny || (sig12 < kTol0 && (s12x < 0 || m12x < 0))) {
        sig12 = m12x = s12x = 0;
      }
      s12x *= b_;
    } else {
      meridian = false;  // short-cut not valid; fall through to the general case
    }
  }

  if (!meridian && sbet1 == 0 && (f_ <= 0 || lon12s >= f_ * 180)) {
    // Equatorial geodesic.
    s12x = a_ * lam12;
  } else if (!meridian) {
    double dnm = 0;
    sig12 = inverse_start(sbet1, cbet1, dn1, sbet2, cbet2, dn2, lam12, slam12, clam12, salp1,
                          calp1, salp2, calp2, dnm);
    if (sig12 >= 0) {
      s12x = sig12 * b_ * dnm;
    } else {
      double ssig1 = 0, csig1 = 0, ssig2 = 0, csig2 = 0, eps = 0;
      int numit = 0;
      double salp1a = kTiny, calp1a = 1, salp1b = kTiny, calp1b = -1;
      bool tripn = false, tripb = false;
      for (;;) {
        double dv = 0;
        const double v = lambda12(sbet1, cbet1, dn1, sbet2, cbet2, dn2, salp1, calp1, slam12,
                                  clam12, salp2, calp2, sig12, ssig1, csig1, ssig2, csig2, eps,
                                  numit < kMaxit1, dv, ws);
        if (tripb || !(std::fabs(v) >= (tripn ? 8 : 1) * kTol0) || numit == kMaxit2) break;
        // Maintain a bracket [alp1a, alp1b] on the root.
        if (v > 0 && (numit > kMaxit1 || calp1 / salp1 > calp1b / salp1b)) {
          salp1b = salp1;
          calp1b = calp1;
        } else if (v < 0 && (numit > kMaxit1 || calp1 / salp1 < calp1a / salp1a)) {
          salp1a = salp1;
          calp1a = calp1;
        }
        ++numit;
        if (numit < kMaxit1 && dv > 0) {
          const double dalp1 = -v / dv;
          if (std::fabs(dalp1) < kPi) {
            const double sdalp1 = std::sin(dalp1), cdalp1 = std::cos(dalp1);
            const double nsalp1 = salp1 * cdalp1 + calp1 * sdalp1;
            if (nsalp1 > 0) {
              calp1 = calp1 * cdalp1 - salp1 * sdalp1;
              salp1 = nsalp1;
              norm2(salp1, calp1);
              tripn = std::fabs(v) <= 16 * kTol0;
              continue;
            }
          }
        }
        // Newton step failed or left the bracket: bisect.
        salp1 = (salp1a + salp1b) / 2;
        calp1 = (calp1a + calp1b) / 2;
        norm2(salp1, calp1);
        tripn = false;
        tripb = (std::fabs(salp1a - salp1) + (calp1a - calp1) < kTolb ||
                 std::fabs(salp1 - salp1b) + (calp1 - calp1b) < kTolb);
      }
      lengths(eps, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, &s12x, nullptr, ws);
      s12x *= b_;
    }
  }
  return 0.0 + s12x;
}

bool valid(const Point& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) && p.latitude >= -90 &&
         p.latitude <= 90 && p.longitude >= -180 && p.longitude <= 180;
}

double geodesic_distance_km(const Point& a, const Point& b) {
  return Geodesic::wgs84().inverse_m(a.latitude, a.longitude, b.latitude, b.longitude) / 1000.0;
}

}  // namespace smi::geo

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smi::geo {

struct Point {
  double latitude = 0;   // degrees, [-90, 90]
  double longitude = 0;  // degrees, [-180, 180]

  friend bool operator==(const Point&, const Point&) = default;
};

bool valid(const Point& p);

/// Geodesics on an ellipsoid of revolution, solved with Karney's method
/// (Newton iteration on the auxiliary sphere with sixth-order series in the
/// third flattening). Only the inverse problem's distance is exposed.
///
/// Accuracy is at the 15 nm level for the WGS-84 ellipsoid, including
/// nearly antipodal points, where the astroid start and bisection fallback
/// guarantee convergence within `maxit2` iterations.
class Geodesic {
 public:
  Geodesic(double equatorial_radius_m, double flattening);

  static const Geodesic& wgs84();

  /// Length in meters of the shortest geodesic between (lat1, lon1) and
  /// (lat2, lon2), all in degrees.
  double inverse_m(double lat1, double lon1, double lat2, double lon2) const;

  double equatorial_radius() const { return a_; }
  double flattening() const { return f_; }

 private:
  struct Workspace;

  double a3f(double eps) const;
  void c3f(double eps, double c[]) const;
  void lengths(double eps, double sig12, double ssig1, double csig1, double dn1,
               double ssig2, double csig2, double dn2, double* s12b, double* m12b,
               Workspace& ws) const;
  double inverse_start(double sbet1, double cbet1, double dn1, double sbet2, double cbet2,
                       double dn2, double lam12, double slam12, double clam12, double& salp1,
                       double& calp1, double& salp2, double& calp2, double& dnm) const;
  double lambda12(double sbet1, double cbet1, double dn1, double sbet2, double cbet2,
                  double dn2, double salp1, double calp1, double slam120, double clam120,
                  double& salp2, double& calp2, double& sig12, double& ssig1, double& csig1,
                  double& ssig2, double& csig2, double& eps, bool diffp, double& dlam12,
                  Workspace& ws) const;

  double a_, f_, f1_, e2_, ep2_, n_, b_, etol2_;
  double a3x_[6];
  double c3x_[15];
};

/// WGS-84 geodesic distance in kilometers. Symmetric, zero for identical
/// points.
double geodesic_distance_km(const Point& a, const Point& b);

struct Centroid {
  Point point;
  bool degenerate = false;  // mean vector vanished; point is the first input
};

/// Spherical centroid: points become unit 3-vectors, the mean vector is
/// renormalized and converted back. A single point (or a set of identical
/// points) is returned unchanged. Throws std::invalid_argument when empty.
Centroid centroid(std::span<const Point> points);

}  // namespace smi::geo

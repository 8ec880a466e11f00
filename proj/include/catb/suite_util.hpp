#pragma once

#include <array>
#include <cmath>

#include "classifier.hpp"
#include "disk.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "schwarzian.hpp"

namespace catb {

inline DiskPoint random_disk_point(Rng& rng, double rmax) {
  const double r = rmax * std::sqrt(rng.uniform());
  return disk_point(std::polar(r, rng.uniform(0.0, kTwoPi)));
}

// point at a prescribed hyperbolic distance from the origin
inline DiskPoint random_disk_point_at(Rng& rng, double dist) {
  const double th = std::tanh(0.5 * dist);
  const double m2 = (1.0 - th) * (1.0 + th);
  return {std::polar(th, rng.uniform(0.0, kTwoPi)), m2};
}

inline MoebiusDisk random_moebius(Rng& rng) {
  const DiskPoint p = random_disk_point(rng, 0.7);
  return MoebiusDisk::to_origin(p).inverse() * MoebiusDisk::rotation(rng.uniform(0.0, kTwoPi));
}

// Gaussian entries, positive determinant, trace kept outside the given band
// around |tr| = 2.
inline HalfPlaneMatrix random_halfplane_matrix(Rng& rng, double trace_band) {
  for (;;) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    if (a * d - b * c < 0.05) continue;
    const HalfPlaneMatrix m = HalfPlaneMatrix::normalized(a, b, c, d);
    if (std::abs(std::abs(m.trace()) - 2.0) <= trace_band) continue;
    return m;
  }
}

inline double quad_min_separation(const std::array<CirclePoint, 4>& q) {
  double m = 1e300;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) m = std::min(m, chordal(q[i], q[j]));
  return m;
}

inline std::array<CirclePoint, 4> random_separated_quad(Rng& rng, double min_sep) {
  std::array<CirclePoint, 4> q;
  do {
    for (auto& a : q) a = circle_point(rng.uniform(0.0, kTwoPi));
  } while (quad_min_separation(q) < min_sep);
  return q;
}

inline Geodesic random_geodesic(Rng& rng) {
  CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
  CirclePoint eta = circle_point(rng.uniform(0.0, kTwoPi));
  while (chordal(xi, eta) < 0.2) eta = circle_point(rng.uniform(0.0, kTwoPi));
  return Geodesic::through(xi, eta).flowed(rng.uniform(-1.5, 1.5));
}

inline void sandwich_case(PropertyCheck& check, const CircleMap& f, Rng& rng, double s_sup) {
  const DiskPoint x = random_disk_point(rng, 0.75);
  const DiskPoint y = random_disk_point(rng, 0.75);
  CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
  CirclePoint eta = circle_point(rng.uniform(0.0, kTwoPi));
  while (chordal(xi, eta) < 0.05) eta = circle_point(rng.uniform(0.0, kTwoPi));
  const GmvtVerdict v = conf_gmvt_check(f, x, y, xi, eta, s_sup);
  check.bound(std::abs(v.ratio_log), v.bound);
}

inline double rec_diameter(const OrbitRecord& rec) {
  double d = 0.0;
  for (std::size_t i = 0; i < rec.points.size(); ++i)
    for (std::size_t j = i + 1; j < rec.points.size(); ++j)
      d = std::max(d, disk_distance(rec.points[i], rec.points[j]));
  return d;
}

}  // namespace catb

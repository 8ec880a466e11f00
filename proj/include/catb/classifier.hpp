#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "circle_map.hpp"
#include "disk.hpp"
#include "tree_extension.hpp"

namespace catb {

// Orbit of a basepoint under the extensions of the iterates f^n, n in [-N, N].
// For a map coming from a matrix the extensions are the exact isometries.
struct OrbitRecord {
  int N = 0;
  std::vector<DiskPoint> points;  // index i holds n = i - N

  const DiskPoint& at(int n) const { return points[n + N]; }
};

inline OrbitRecord moebius_orbit(const MoebiusDisk& m, const DiskPoint& x, int N) {
  OrbitRecord rec;
  rec.N = N;
  rec.points.assign(2 * N + 1, x);
  const MoebiusDisk mi = m.inverse();
  DiskPoint fwd = x, bwd = x;
  for (int n = 1; n <= N; ++n) {
    fwd = m.apply(fwd);
    bwd = mi.apply(bwd);
    rec.points[N + n] = fwd;
    rec.points[N - n] = bwd;
  }
  return rec;
}

// Same orbit through the embed/push-forward/project machinery; slow, used to
// cross-check the exact path.
template <typename ExtensionMap>
OrbitRecord extension_orbit(const ExtensionMap& ext, const DiskPoint& x, int N) {
  OrbitRecord rec;
  rec.N = N;
  rec.points.assign(2 * N + 1, x);
  DiskPoint fwd = x;
  for (int n = 1; n <= N; ++n) {
    fwd = ext.map(fwd, fwd);
    rec.points[N + n] = fwd;
  }
  return rec;
}

struct Classification {
  enum class Kind { elliptic, parabolic, hyperbolic, undecided };
  Kind kind = Kind::undecided;
  std::optional<CirclePoint> fixed_forward;   // xi_+ (or xi_0 for parabolic)
  std::optional<CirclePoint> fixed_backward;  // xi_-
  double diameter = 0.0;
  double growth_rate = 0.0;
  std::string note;
};

inline const char* to_string(Classification::Kind k) {
  switch (k) {
    case Classification::Kind::elliptic: return "elliptic";
    case Classification::Kind::parabolic: return "parabolic";
    case Classification::Kind::hyperbolic: return "hyperbolic";
    default: return "undecided";
  }
}

namespace detail {

// Aitken extrapolation of the escape direction from equally spaced angles at
// n = N/2, 3N/4, N (exact for geometric convergence, improves 1/n tails);
// returns (limit, correction size).
inline std::pair<double, double> extrapolate_direction(const OrbitRecord& rec, int sign) {
  const int N = rec.N;
  auto angle = [&](int n) { return std::arg(rec.at(sign * n).z); };
  double a0 = angle(std::max(1, N / 2));
  double a1 = angle(std::max(2, 3 * N / 4));
  double a2 = angle(N);
  // unwrap against the last value
  a1 = a2 + circle_diff(a1, a2);
  a0 = a1 + circle_diff(a0, a1);
  const double d1 = a1 - a0, d2 = a2 - a1;
  double limit = a2;
  if (std::abs(d2 - d1) > 1e-15) {
    const double corr = d2 * d2 / (d2 - d1);
    if (std::abs(corr) < 1.0) limit = a2 - corr;
  }
  return {limit, std::abs(limit - a2)};
}

}  // namespace detail

// Orbit trichotomy. Bounded orbits are elliptic; escaping orbits are split by
// the displacement growth rate (linear for an axis translation, logarithmic
// for a one-point escape) with the accumulation directions extrapolated from
// the orbit. Anything between the decision thresholds is reported undecided
// so the caller can raise N.
inline Classification classify_orbit(const OrbitRecord& rec, double radius_threshold = 10.0,
                                     double cluster_tol = 0.05) {
  Classification out;
  const int N = rec.N;
  const DiskPoint& x0 = rec.at(0);

  for (std::size_t i = 0; i < rec.points.size(); ++i)
    for (std::size_t j = i + 1; j < rec.points.size(); ++j)
      out.diameter = std::max(out.diameter, disk_distance(rec.points[i], rec.points[j]));

  // displacement growth over the last quarter, the unboundedness signal
  auto max_disp = [&](int lo, int hi) {
    double m = 0.0;
    for (int n = lo; n <= hi; ++n)
      m = std::max({m, disk_distance(x0, rec.at(n)), disk_distance(x0, rec.at(-n))});
    return m;
  };
  const int q = std::max(1, N / 4);
  const double grow = max_disp(N - q, N) - max_disp(std::max(1, N - 2 * q), N - q - 1);

  if (grow <= 0.02) {
    out.kind = Classification::Kind::elliptic;
    return out;
  }
  if (out.diameter < radius_threshold) {
    out.kind = Classification::Kind::undecided;
    out.note = "orbit inside the radius threshold but still growing; raise N";
    return out;
  }

  // rate of displacement growth per step on the tail
  const double rate =
      (disk_distance(x0, rec.at(N)) - disk_distance(x0, rec.at(N / 2))) / (N - N / 2);
  out.growth_rate = rate;

  const auto [fwd, fwd_corr] = detail::extrapolate_direction(rec, +1);
  const auto [bwd, bwd_corr] = detail::extrapolate_direction(rec, -1);
  const bool directions_stable =
      fwd_corr <= 0.5 * cluster_tol && bwd_corr <= 0.5 * cluster_tol;
  const double separation = std::abs(circle_diff(fwd, bwd));

  if (rate * N >= 10.0 && directions_stable) {
    out.kind = Classification::Kind::hyperbolic;
    out.fixed_forward = circle_point(fwd);
    out.fixed_backward = circle_point(bwd);
    if (separation <= cluster_tol)
      out.note = "axis endpoints closer than cluster_tol; split by growth rate";
    return out;
  }
  if (rate * N <= 5.0 && directions_stable && separation <= cluster_tol) {
    out.kind = Classification::Kind::parabolic;
    out.fixed_forward = circle_point(fwd);
    out.fixed_backward = circle_point(bwd);
    return out;
  }
  out.kind = Classification::Kind::undecided;
  out.note = "growth rate or directions not settled; raise N";
  return out;
}

struct ClassificationRun {
  Classification result;
  int N_used = 0;
};

// Polishes a fixed-direction estimate for a map under which the direction is
// attracting: iterate first (iteration cannot land on the repelling twin),
// then minimize the displacement |f(theta) - theta|, which is still needed in
// the parabolic case where iteration converges only like 1/n.
inline CirclePoint refine_fixed_direction(const CircleMap& f, double guess) {
  double t = guess;
  for (int n = 0; n < 2000; ++n) t = f.value(t);
  auto disp = [&](double s) { return std::abs(circle_diff(f.value(s), s)); };
  if (disp(t) > 1e-12) {
    const double gr = 0.6180339887498949;
    double lo = t - 0.02, hi = t + 0.02;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = disp(x1), f2 = disp(x2);
    for (int it = 0; it < 90; ++it) {
      if (f1 > f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = disp(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = disp(x1);
      }
    }
    t = 0.5 * (lo + hi);
  }
  return circle_point(t);
}

// Doubles the horizon until the verdict settles, then polishes the reported
// fixed directions against the boundary action.
inline ClassificationRun classify_moebius_map(const MoebiusDisk& m, const DiskPoint& x,
                                              int N0 = 50, double radius_threshold = 10.0,
                                              double cluster_tol = 0.05, int N_cap = 6400) {
  for (int N = N0;; N *= 2) {
    OrbitRecord rec = moebius_orbit(m, x, N);
    Classification c = classify_orbit(rec, radius_threshold, cluster_tol);
    if (c.kind != Classification::Kind::undecided || 2 * N > N_cap) {
      // the forward direction attracts under f, the backward one under f^{-1}
      if (c.fixed_forward)
        c.fixed_forward = refine_fixed_direction(moebius_boundary_map(m),
                                                 c.fixed_forward->theta);
      if (c.fixed_backward)
        c.fixed_backward = refine_fixed_direction(moebius_boundary_map(m.inverse()),
                                                  c.fixed_backward->theta);
      return {c, N};
    }
  }
}

// Finite-order end permutations of a finite-core tree keep every orbit inside
// the core neighbourhood: the bounded case.
inline Rational tree_orbit_diameter(const TreeIsometry& iso, const TreePoint& x, int N) {
  std::vector<TreePoint> pts{x};
  TreePoint cur = x;
  for (int n = 1; n <= N; ++n) {
    cur = iso.map(cur);
    pts.push_back(cur);
  }
  Rational diam(0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      diam = std::max(diam, tree_distance(iso.source(), pts[i], pts[j]));
  return diam;
}

}  // namespace catb

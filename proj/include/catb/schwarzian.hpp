#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "circle_map.hpp"
#include "disk.hpp"

namespace catb {

// log df_{rho_x, rho_y} at xi: angular derivative of f times the ratio of
// Poisson kernels at the image and source.
inline double log_conformal_derivative(const CircleMap& f, const DiskPoint& x,
                                       const DiskPoint& y, const CirclePoint& xi) {
  const CirclePoint fxi = f(xi);
  return std::log(f.deriv(xi.theta)) + log_poisson(y, fxi) - log_poisson(x, xi);
}

inline double conformal_derivative(const CircleMap& f, const DiskPoint& x, const DiskPoint& y,
                                   const CirclePoint& xi) {
  return std::exp(log_conformal_derivative(f, x, y, xi));
}

struct SchwarzianValue {
  CirclePoint xi, eta;
  double value;
};

namespace detail {

inline double schwarzian_once(const CircleMap& f, const Geodesic& gx, const Geodesic& gy,
                              const CirclePoint& xi, const CirclePoint& eta, double tx,
                              double ty) {
  const DiskPoint x = gx.point_at(tx);
  const DiskPoint y = gy.point_at(ty);
  return -(log_conformal_derivative(f, x, y, xi) + log_conformal_derivative(f, x, y, eta));
}

// single evaluation without the cross-check; used by dense sampling
inline double schwarzian_fast(const CircleMap& f, const CirclePoint& xi,
                              const CirclePoint& eta) {
  const Geodesic gx = Geodesic::through(xi, eta);
  const Geodesic gy = Geodesic::through(f(xi), f(eta));
  return schwarzian_once(f, gx, gy, xi, eta, 0.0, 0.0);
}

}  // namespace detail

// -log(df(xi) df(eta)) with the derivative normalized at points of the source
// and image geodesics; the value is independent of those choices, which is
// re-verified at two more basepoint pairs.
inline SchwarzianValue integrated_schwarzian(const CircleMap& f, const CirclePoint& xi,
                                             const CirclePoint& eta, double tol = 1e-9) {
  const Geodesic gx = Geodesic::through(xi, eta);
  const Geodesic gy = Geodesic::through(f(xi), f(eta));
  const double s0 = detail::schwarzian_once(f, gx, gy, xi, eta, 0.0, 0.0);
  const double s1 = detail::schwarzian_once(f, gx, gy, xi, eta, 0.7, -0.4);
  const double s2 = detail::schwarzian_once(f, gx, gy, xi, eta, -1.1, 0.9);
  if (std::abs(s1 - s0) > tol || std::abs(s2 - s0) > tol)
    throw std::runtime_error("integrated Schwarzian is basepoint-dependent beyond tolerance");
  return {xi, eta, s0};
}

// Image geodesic under the induced flow conjugacy: endpoints (f xi, f eta),
// basepoint the unique point making df = 1 at the forward endpoint.
inline Geodesic conjugate_geodesic(const CircleMap& f, const Geodesic& g) {
  const Geodesic image = Geodesic::through(f(g.backward()), f(g.forward()));
  const DiskPoint x = g.point_at(0.0);
  const double shift =
      -log_conformal_derivative(f, x, image.point_at(0.0), g.forward());
  return image.flowed(shift);
}

// d(conjugate(flip g), flip(flow_{-S} conjugate(g))); zero by construction, so
// this measures numerical consistency (and S itself for Moebius maps).
inline double flip_deviation(const CircleMap& f, const Geodesic& g) {
  const double t = integrated_schwarzian(f, g.backward(), g.forward()).value;
  const DiskPoint lhs = conjugate_geodesic(f, g.flipped()).point_at(0.0);
  const DiskPoint rhs = conjugate_geodesic(f, g).flowed(-t).point_at(0.0);
  return disk_distance(lhs, rhs);
}

// Both sides of the cross-ratio distortion identity, evaluated independently:
// the left from visual cross-ratios at the origin, the right from four
// Schwarzian values. quad = (xi, xi', eta, eta').
inline double distortion_residual(const CircleMap& f, const std::array<CirclePoint, 4>& quad,
                                  double min_sep = 1e-4) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (chordal(quad[i], quad[j]) < min_sep)
        throw std::domain_error("ill-conditioned quadruple (near-coincident points)");
  const DiskPoint o = disk_origin();
  auto log_cr = [&o](const CirclePoint& a, const CirclePoint& b, const CirclePoint& c,
                     const CirclePoint& d) {
    return visual_log(o, a, c) + visual_log(o, b, d) - visual_log(o, a, d) -
           visual_log(o, b, c);
  };
  const std::array<CirclePoint, 4> im{f(quad[0]), f(quad[1]), f(quad[2]), f(quad[3])};
  const double lhs = log_cr(im[0], im[1], im[2], im[3]) -
                     log_cr(quad[0], quad[1], quad[2], quad[3]);
  const double rhs = 0.5 * (integrated_schwarzian(f, quad[0], quad[2]).value +
                            integrated_schwarzian(f, quad[1], quad[3]).value -
                            integrated_schwarzian(f, quad[0], quad[3]).value -
                            integrated_schwarzian(f, quad[1], quad[2]).value);
  return std::abs(lhs - rhs);
}

// Lower bound on ||S(f)||_inf by grid sampling of the pair space plus local
// golden-section refinement around the grid argmax.
inline double schwarzian_sup(const CircleMap& f, int grid = 128) {
  double best = 0.0;
  double bi = 0.0, bj = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = i + 1; j < grid; ++j) {
      const double ti = kTwoPi * (i + 0.5) / grid;
      const double tj = kTwoPi * (j + 0.5) / grid;
      const double v = std::abs(detail::schwarzian_fast(f, circle_point(ti), circle_point(tj)));
      if (v > best) {
        best = v;
        bi = ti;
        bj = tj;
      }
    }
  // coordinate-wise golden-section refinement
  const double gr = 0.6180339887498949;
  const double cell = kTwoPi / grid;
  double ti = bi, tj = bj;
  for (int round = 0; round < 3; ++round) {
    for (int axis = 0; axis < 2; ++axis) {
      double lo = (axis == 0 ? ti : tj) - cell;
      double hi = (axis == 0 ? ti : tj) + cell;
      auto eval = [&](double t) {
        const double a = axis == 0 ? t : ti;
        const double b = axis == 0 ? tj : t;
        // sub-cell separations carry no extra information about the sup and
        // amplify rounding noise quadratically
        if (std::abs(circle_diff(a, b)) < 0.25 * cell) return 0.0;
        return std::abs(detail::schwarzian_fast(f, circle_point(a), circle_point(b)));
      };
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = eval(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = eval(x1);
        }
      }
      const double t = 0.5 * (lo + hi);
      const double v = eval(t);
      if (v > best) best = v;
      (axis == 0 ? ti : tj) = t;
    }
  }
  return best;
}

struct GmvtVerdict {
  bool holds;
  double ratio_log;  // log of (rho_y(f xi, f eta)/rho_x(xi, eta))^2 / (df(xi) df(eta))
  double bound;      // 4*||S|| + slack
};

inline GmvtVerdict conf_gmvt_check(const CircleMap& f, const DiskPoint& x, const DiskPoint& y,
                                   const CirclePoint& xi, const CirclePoint& eta, double s_sup,
                                   double slack = 1e-6) {
  const double ratio_log =
      2.0 * (visual_log(y, f(xi), f(eta)) - visual_log(x, xi, eta)) -
      log_conformal_derivative(f, x, y, xi) - log_conformal_derivative(f, x, y, eta);
  const double bound = 4.0 * s_sup + slack;
  return {std::abs(ratio_log) <= bound, ratio_log, bound};
}

inline double cocycle_residual(const CircleMap& f, const CircleMap& g, const CirclePoint& xi,
                               const CirclePoint& eta) {
  const CircleMap gf = compose_maps(g, f);
  return std::abs(integrated_schwarzian(gf, xi, eta).value -
                  integrated_schwarzian(g, f(xi), f(eta)).value -
                  integrated_schwarzian(f, xi, eta).value);
}

// d(pi(phi(v_t)), pi(phi(w_t))) - d(x_t, y_t) along the rays from x to xi and
// eta; converges to S(f)(xi, eta).
inline std::vector<double> distance_diff_profile(const CircleMap& f, const DiskPoint& x,
                                                 const CirclePoint& xi, const CirclePoint& eta,
                                                 const std::vector<double>& ts) {
  for (double t : ts)
    if (t > 30.0)
      throw std::domain_error("t > 30 rejected: Poisson kernels denormalize");
  const Geodesic ga = Geodesic::ray_from(x, xi);
  const Geodesic gb = Geodesic::ray_from(x, eta);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const DiskPoint p = conjugate_geodesic(f, ga.flowed(t)).point_at(0.0);
    const DiskPoint q = conjugate_geodesic(f, gb.flowed(t)).point_at(0.0);
    out.push_back(disk_distance(p, q) - disk_distance(ga.point_at(t), gb.point_at(t)));
  }
  return out;
}

struct AsymptoticDistances {
  std::vector<double> forward;   // d(pi phi(v_n), pi phi(w_n))
  std::vector<double> backward;  // d(pi phi(-v_n), pi phi(-w_n))
};

// Concrete forward-asymptotic schedule: v_n is the flow of g at time t_n; w_n
// is tangent to the geodesic (xi0, eta + delta_n) at the foot of g(t_n).
inline AsymptoticDistances forward_asymptotic_pairs(
    const CircleMap& f, const Geodesic& g, const CirclePoint& xi0,
    const std::vector<std::pair<double, double>>& schedule) {
  AsymptoticDistances out;
  for (const auto& [t, delta] : schedule) {
    const Geodesic v = g.flowed(t);
    Geodesic w = Geodesic::through(xi0, circle_point(g.forward().theta + delta));
    w = w.flowed(w.nearest_parameter(v.point_at(0.0)));
    const Geodesic cv = conjugate_geodesic(f, v);
    const Geodesic cw = conjugate_geodesic(f, w);
    out.forward.push_back(disk_distance(cv.point_at(0.0), cw.point_at(0.0)));
    out.backward.push_back(disk_distance(conjugate_geodesic(f, v.flipped()).point_at(0.0),
                                         conjugate_geodesic(f, w.flipped()).point_at(0.0)));
  }
  return out;
}

inline std::vector<double> forward_asymptotic_decay(
    const CircleMap& f, const Geodesic& g, const CirclePoint& xi0,
    const std::vector<std::pair<double, double>>& schedule) {
  return forward_asymptotic_pairs(f, g, xi0, schedule).forward;
}

}  // namespace catb

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace catb {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInteriorMargin = 1e-12;

// Interior point. m2 = 1 - |z|^2 is carried separately: constructions that
// walk deep along geodesics can supply it without the catastrophic
// cancellation of recomputing it from z.
struct DiskPoint {
  Complex z;
  double m2;
};

inline DiskPoint disk_point(Complex z) {
  const double a = std::abs(z);
  if (!(a < 1.0 - kInteriorMargin))
    throw std::domain_error("point is not in the open disk (|z| too close to 1)");
  return {z, (1.0 - a) * (1.0 + a)};
}

inline DiskPoint disk_origin() { return {Complex(0.0, 0.0), 1.0}; }

inline double disk_distance(const DiskPoint& x, const DiskPoint& y) {
  return 2.0 * std::asinh(std::abs(x.z - y.z) / std::sqrt(x.m2 * y.m2));
}

struct CirclePoint {
  double theta;  // normalized to [0, 2*pi)
  Complex u;     // e^{i theta}
};

inline CirclePoint circle_point(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return {t, std::polar(1.0, t)};
}

// signed angular difference in (-pi, pi]
inline double circle_diff(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  return d;
}

inline double chordal(const CirclePoint& a, const CirclePoint& b) { return std::abs(a.u - b.u); }

inline double log_poisson(const DiskPoint& x, const CirclePoint& xi) {
  return std::log(x.m2) - 2.0 * std::log(std::abs(x.z - xi.u));
}

// B(xi, x, y) = lim d(x,a) - d(y,a) as a -> xi radially.
inline double busemann(const CirclePoint& xi, const DiskPoint& x, const DiskPoint& y) {
  return log_poisson(y, xi) - log_poisson(x, xi);
}

inline double visual_log(const DiskPoint& x, const CirclePoint& xi, const CirclePoint& eta) {
  const double sep = chordal(xi, eta);
  if (sep == 0.0) throw std::domain_error("visual metric of a boundary point with itself");
  return std::log(0.5 * sep) + 0.5 * (log_poisson(x, xi) + log_poisson(x, eta));
}

inline double visual_metric(const DiskPoint& x, const CirclePoint& xi, const CirclePoint& eta) {
  return std::exp(visual_log(x, xi, eta));
}

// Unit-determinant self-map of the disk, z |-> (a z + b) / (conj(b) z + conj(a))
// with |a|^2 - |b|^2 = 1.
struct MoebiusDisk {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  static MoebiusDisk identity() { return {}; }

  static MoebiusDisk rotation(double alpha) { return {std::polar(1.0, alpha / 2.0), 0.0}; }

  // isometry sending p to the origin
  static MoebiusDisk to_origin(const DiskPoint& p) {
    const double s = std::sqrt(p.m2);
    return {Complex(1.0 / s, 0.0), -p.z / s};
  }

  // normalizes |a|^2 - |b|^2 to 1; rejects non-positive determinants
  static MoebiusDisk su11(Complex a, Complex b) {
    const double det = std::norm(a) - std::norm(b);
    if (det <= 0) throw std::domain_error("matrix does not preserve the disk (det <= 0)");
    const double s = std::sqrt(det);
    return {a / s, b / s};
  }

  MoebiusDisk inverse() const { return {std::conj(a), -b}; }

  MoebiusDisk operator*(const MoebiusDisk& rhs) const {
    return {a * rhs.a + b * std::conj(rhs.b), a * rhs.b + b * std::conj(rhs.a)};
  }

  DiskPoint apply(const DiskPoint& p) const {
    const Complex den = std::conj(b) * p.z + std::conj(a);
    return {(a * p.z + b) / den, p.m2 / std::norm(den)};
  }

  CirclePoint apply(const CirclePoint& p) const {
    const Complex w = (a * p.u + b) / (std::conj(b) * p.u + std::conj(a));
    return circle_point(std::arg(w));
  }

  // angular derivative of the boundary action at p
  double boundary_derivative(const CirclePoint& p) const {
    return 1.0 / std::norm(std::conj(b) * p.u + std::conj(a));
  }
};

// Real unit-determinant matrix acting on the upper half-plane; the classical
// oracle representation.
struct HalfPlaneMatrix {
  double a, b, c, d;

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  static HalfPlaneMatrix normalized(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (det <= 0) throw std::domain_error("half-plane matrix must have positive determinant");
    const double s = std::sqrt(det);
    return {a / s, b / s, c / s, d / s};
  }

  // conjugation by the Cayley transform w |-> (w - i)/(w + i)
  MoebiusDisk to_disk() const {
    const Complex alpha((a + d) / 2.0, (b - c) / 2.0);
    const Complex beta((a - d) / 2.0, -(b + c) / 2.0);
    return MoebiusDisk::su11(alpha, beta);
  }
};

enum class MapClass { elliptic, parabolic, hyperbolic };

inline const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::elliptic: return "elliptic";
    case MapClass::parabolic: return "parabolic";
    default: return "hyperbolic";
  }
}

inline MapClass classify_by_trace(const HalfPlaneMatrix& m, double tol = 1e-9) {
  const double t = std::abs(m.trace());
  if (std::abs(t - 2.0) <= tol) return MapClass::parabolic;
  return t < 2.0 ? MapClass::elliptic : MapClass::hyperbolic;
}

// Riemannian angle at x between the directions toward y and toward xi.
inline double angle_at(const DiskPoint& x, const DiskPoint& y, const CirclePoint& xi) {
  const MoebiusDisk t = MoebiusDisk::to_origin(x);
  const Complex wy = t.apply(y).z;
  if (std::abs(wy) == 0.0) throw std::domain_error("angle at a point with itself");
  const Complex wxi = t.apply(xi).u;
  return std::abs(circle_diff(std::arg(wy), std::arg(wxi)));
}

// dρ_y/dρ_x at xi from the comparison angle; must agree with exp(busemann).
inline double derivative_from_angle(const DiskPoint& x, const DiskPoint& y,
                                    const CirclePoint& xi) {
  const double t = disk_distance(x, y);
  const double s = std::sin(0.5 * angle_at(x, y, xi));
  return 1.0 / ((std::exp(t) - std::exp(-t)) * s * s + std::exp(-t));
}

// Bi-infinite unit-speed geodesic. frame_ maps the standard diameter onto it
// (-1 to the backward endpoint, +1 to the forward endpoint); point_at(0) is
// the basepoint, which sits at parameter s0_ along the standard diameter.
class Geodesic {
 public:
  static Geodesic through(const CirclePoint& xi, const CirclePoint& eta) {
    return Geodesic(xi, eta, standard_frame(xi, eta), 0.0);
  }

  static Geodesic through(const CirclePoint& xi, const CirclePoint& eta, const DiskPoint& base,
                          double tol = 1e-9) {
    MoebiusDisk fr = standard_frame(xi, eta);
    const DiskPoint w = fr.inverse().apply(base);
    const double im = std::abs(w.z.imag());
    // distance from the diameter: half of d(w, conj w)
    if (std::asinh(2.0 * im / w.m2) > tol)
      throw std::domain_error("basepoint is not on the geodesic");
    return Geodesic(xi, eta, fr, diameter_parameter(w));
  }

  // extends the ray [x, forward) backward through x
  static Geodesic ray_from(const DiskPoint& x, const CirclePoint& forward) {
    const MoebiusDisk t = MoebiusDisk::to_origin(x);
    const CirclePoint w = t.apply(forward);
    const CirclePoint back = t.inverse().apply(circle_point(w.theta + std::numbers::pi));
    MoebiusDisk fr = standard_frame(back, forward);
    const DiskPoint wx = fr.inverse().apply(x);
    return Geodesic(back, forward, fr, diameter_parameter(wx));
  }

  const CirclePoint& backward() const { return xi_; }
  const CirclePoint& forward() const { return eta_; }
  double base_parameter() const { return s0_; }

  DiskPoint point_at(double t) const {
    const double s = s0_ + t;
    const double e = std::exp(-std::abs(s));
    const double th = (s >= 0 ? 1.0 : -1.0) * (1.0 - e) / (1.0 + e);
    const double m2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    return frame_.apply(DiskPoint{Complex(th, 0.0), m2});
  }

  Geodesic flowed(double t) const { return Geodesic(xi_, eta_, frame_, s0_ + t); }

  Geodesic flipped() const {
    return Geodesic(eta_, xi_, frame_ * MoebiusDisk::rotation(std::numbers::pi), -s0_);
  }

  // parameter (in point_at coordinates) of the foot of p on the geodesic
  double nearest_parameter(const DiskPoint& p) const {
    return diameter_parameter(frame_.inverse().apply(p)) - s0_;
  }

 private:
  Geodesic(CirclePoint xi, CirclePoint eta, MoebiusDisk frame, double s0)
      : xi_(xi), eta_(eta), frame_(frame), s0_(s0) {}

  // signed arclength parameter of the projection of w onto the real diameter;
  // 1 - Re(w)^2 = m2 + Im(w)^2 avoids cancellation near the circle
  static double diameter_parameter(const DiskPoint& w) {
    const double re = w.z.real(), im = w.z.imag();
    const double m2 = w.m2 + im * im;
    return (re >= 0 ? 2.0 : -2.0) * std::asinh(std::abs(re) / std::sqrt(m2));
  }

  // isometry with frame(-1) = xi, frame(+1) = eta. The point of the geodesic
  // nearest the origin sits along the bisector of the short arc at radius
  // cos(d/2)/(1 + sin(d/2)), d the angular separation; this form stays inside
  // the disk for any separation (the orthogonal-circle solve does not).
  static MoebiusDisk standard_frame(const CirclePoint& xi, const CirclePoint& eta) {
    if (chordal(xi, eta) < 1e-12)
      throw std::domain_error("geodesic endpoints must be distinct");
    const double gap = circle_diff(eta.theta, xi.theta);
    const double half = 0.5 * std::abs(gap);
    const double pr = std::cos(half) / (1.0 + std::sin(half));
    const double m2 = 2.0 * std::sin(half) / (1.0 + std::sin(half));
    const DiskPoint foot{std::polar(pr, xi.theta + 0.5 * gap), m2};
    const MoebiusDisk shift = MoebiusDisk::to_origin(foot);
    const CirclePoint wv = shift.apply(eta);
    const MoebiusDisk h = MoebiusDisk::rotation(-wv.theta) * shift;
    return h.inverse();
  }

  CirclePoint xi_, eta_;
  MoebiusDisk frame_;
  double s0_;
};

// sup of a smooth function on the circle: uniform grid plus golden-section
// refinement around every grid-local maximum near the top. The overload taking
// precomputed grid values avoids re-evaluating expensive integrands on the
// scan pass; fn is then only consulted during refinement.
inline double circle_sup(const std::vector<double>& vals,
                         const std::function<double(double)>& fn, double window = 1e-3) {
  const int grid = static_cast<int>(vals.size());
  double gmax = -1e300;
  for (int i = 0; i < grid; ++i) gmax = std::max(gmax, vals[i]);
  const double gr = 0.6180339887498949;
  const double cell = kTwoPi / grid;
  double best = gmax;
  for (int i = 0; i < grid; ++i) {
    const double prev = vals[(i + grid - 1) % grid], next = vals[(i + 1) % grid];
    if (!(vals[i] >= prev && vals[i] >= next && vals[i] >= gmax - window)) continue;
    double lo = kTwoPi * i / grid - cell, hi = kTwoPi * i / grid + cell;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = fn(x1), f2 = fn(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = fn(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = fn(x1);
      }
    }
    best = std::max(best, fn(0.5 * (lo + hi)));
  }
  return best;
}

inline double circle_sup(const std::function<double(double)>& fn, int grid = 4096,
                         double window = 1e-3) {
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) vals[i] = fn(kTwoPi * i / grid);
  return circle_sup(vals, fn, window);
}

// d_M distance between the visual metrics at x and y: the sup over the circle
// of the Busemann function, which must reproduce d(x, y).
inline double visual_class_distance(const DiskPoint& x, const DiskPoint& y, int grid = 4096) {
  return circle_sup([&](double t) { return busemann(circle_point(t), x, y); }, grid);
}

}  // namespace catb

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "circle_map.hpp"
#include "disk.hpp"
#include "minimax.hpp"
#include "rng.hpp"
#include "schwarzian.hpp"
#include "tree_extension.hpp"

namespace catb {

// Metric on the circle boundary, stored as the log conformal factor against
// the visual metric at the origin: rho(xi,eta) = rho_0(xi,eta) *
// exp((logf(xi)+logf(eta))/2). logf doubles as the interpolation rule; grid
// holds its samples at theta_j = 2 pi j / grid.size().
struct DiskMetric {
  std::function<double(double)> logf;
  std::vector<double> grid;

  double log_dist(const CirclePoint& xi, const CirclePoint& eta) const {
    const double sep = chordal(xi, eta);
    if (sep == 0.0) throw std::domain_error("distance of a boundary point to itself");
    return std::log(0.5 * sep) + 0.5 * (logf(xi.theta) + logf(eta.theta));
  }
};

inline DiskMetric sampled_disk_metric(std::function<double(double)> logf, int resolution) {
  DiskMetric m;
  m.grid.reserve(resolution);
  for (int i = 0; i < resolution; ++i) m.grid.push_back(logf(kTwoPi * i / resolution));
  m.logf = std::move(logf);
  return m;
}

inline DiskMetric embed_disk_point(const DiskPoint& x, int resolution = 1024) {
  return sampled_disk_metric([x](double t) { return log_poisson(x, circle_point(t)); },
                             resolution);
}

// sup |log d(rho2)/d(rho1)| over the circle
inline double class_distance(const DiskMetric& r1, const DiskMetric& r2) {
  const int grid = static_cast<int>(std::max(r1.grid.size(), r2.grid.size()));
  return circle_sup([&](double t) { return std::abs(r2.logf(t) - r1.logf(t)); }, grid);
}

struct MoebiusWitness {
  std::array<double, 4> quad;  // angles
  double source_log_cr, image_log_cr;
};

// Cross-ratio preservation on a deterministic family of well-separated
// quadruples; returns a witness when the map is not Moebius at tol.
inline std::optional<MoebiusWitness> moebius_defect(const CircleMap& f, double tol = 1e-9,
                                                    int samples = 48) {
  const DiskPoint o = disk_origin();
  Rng rng(0x5eedu);
  for (int s = 0; s < samples; ++s) {
    std::array<double, 4> q;
    bool ok = true;
    do {
      for (auto& a : q) a = rng.uniform(0.0, kTwoPi);
      ok = true;
      for (int i = 0; i < 4 && ok; ++i)
        for (int j = i + 1; j < 4 && ok; ++j)
          ok = chordal(circle_point(q[i]), circle_point(q[j])) > 0.1;
    } while (!ok);
    auto log_cr = [&](const std::array<CirclePoint, 4>& p) {
      return visual_log(o, p[0], p[2]) + visual_log(o, p[1], p[3]) -
             visual_log(o, p[0], p[3]) - visual_log(o, p[1], p[2]);
    };
    const std::array<CirclePoint, 4> src{circle_point(q[0]), circle_point(q[1]),
                                         circle_point(q[2]), circle_point(q[3])};
    const std::array<CirclePoint, 4> img{f(src[0]), f(src[1]), f(src[2]), f(src[3])};
    const double a = log_cr(src), b = log_cr(img);
    if (std::abs(a - b) > tol) return MoebiusWitness{q, a, b};
  }
  return std::nullopt;
}

// Push-forward of rho under a Moebius boundary map (rejects non-Moebius f).
// The new conformal factor reads the old one through f^{-1} and absorbs the
// derivative of f.
inline DiskMetric pushforward_disk(const CircleMap& f, const CircleMap& finv,
                                   const DiskMetric& rho, double tol = 1e-9) {
  if (auto w = moebius_defect(f, tol))
    throw NotMoebiusError("boundary map distorts cross-ratios by " +
                              std::to_string(std::abs(w->source_log_cr - w->image_log_cr)),
                          {std::to_string(w->quad[0]), std::to_string(w->quad[1]),
                           std::to_string(w->quad[2]), std::to_string(w->quad[3])});
  auto logf = [f, finv, rho](double alpha) {
    const double t = finv.value(alpha);
    return rho.logf(t) - std::log(f.deriv(t));
  };
  return sampled_disk_metric(std::move(logf), static_cast<int>(rho.grid.size()));
}

struct DiskProjection {
  DiskPoint point;
  double gap;  // minimized sup of log d(rho)/d(rho_y)
  int iterations;
  bool converged;
};

// Nearest visual metric on the disk, by minimax descent on the sup of the log
// derivative.
inline DiskProjection project_disk_metric(const DiskMetric& rho,
                                          DiskPoint start = disk_origin(),
                                          const MinimaxOptions& opt = {}) {
  MinimaxProblem p;
  p.offset_grid = rho.grid;
  const int n = static_cast<int>(rho.grid.size());
  p.image_grid.reserve(n);
  for (int i = 0; i < n; ++i) p.image_grid.push_back(kTwoPi * i / n);
  p.offset = rho.logf;
  p.image = [](double t) { return t; };
  MinimaxResult r = minimax_boundary_descent(p, start, opt);
  return {r.point, r.value, r.iterations, r.converged};
}

// ---------------------------------------------------------------------------
// Admissible boundary metrics beyond the visual ones. A conformal factor
// exp(2U) yields an antipodal diameter-one metric iff U equals its own
// antipodal conjugate U^c(xi) = inf_eta (c(xi,eta) - U(eta)) with cost
// c = -log rho_0. Drawing U from the sinusoidal family and averaging with its
// conjugate converges to such a fixed point; the result is validated by spot
// checks and rejected on failure.

namespace detail {

inline double antipodal_cost(double a, double b) {
  const double s = std::sin(0.5 * std::abs(circle_diff(a, b)));
  if (s < 1e-12) return 1e9;  // distance-to-self excluded from the inf
  return -std::log(s);
}

// the cost is circulant on the grid, so one precomputed row serves every i
inline std::vector<double> antipodal_cost_row(int n) {
  std::vector<double> row(n);
  for (int d = 0; d < n; ++d) row[d] = antipodal_cost(0.0, kTwoPi * d / n);
  return row;
}

inline std::vector<double> antipodal_conjugate(const std::vector<double>& u,
                                               const std::vector<double>& cost_row) {
  const int n = static_cast<int>(u.size());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double best = 1e300;
    for (int j = 0; j < n; ++j) {
      const double v = cost_row[(j - i + n) % n] - u[j];
      if (v < best) best = v;
    }
    out[i] = best;
  }
  return out;
}

}  // namespace detail

struct DiskMetricSpotCheck {
  double antipodal_defect = 0.0;  // sup deviation of sup_eta rho(xi, eta) from 1, in logs
  double triangle_defect = 0.0;   // worst violation of the triangle inequality
};

inline DiskMetricSpotCheck spot_check_disk_metric(const DiskMetric& m, Rng& rng,
                                                  int boundary_samples = 48,
                                                  int triples = 256) {
  DiskMetricSpotCheck out;
  const int grid = static_cast<int>(m.grid.size());
  for (int s = 0; s < boundary_samples; ++s) {
    const double xi = rng.uniform(0.0, kTwoPi);
    const CirclePoint pxi = circle_point(xi);
    const double half_logf_xi = 0.5 * m.logf(xi);
    auto dist_to = [&](double eta) {
      if (std::abs(circle_diff(xi, eta)) < 1e-9) return -1e9;
      return m.log_dist(pxi, circle_point(eta));
    };
    std::vector<double> vals(grid);
    for (int j = 0; j < grid; ++j) {
      const double eta = kTwoPi * j / grid;
      const double sep = std::sin(0.5 * std::abs(circle_diff(xi, eta)));
      vals[j] = sep < 1e-9 ? -1e9 : std::log(sep) + half_logf_xi + 0.5 * m.grid[j];
    }
    const double sup = circle_sup(vals, dist_to);
    out.antipodal_defect = std::max(out.antipodal_defect, std::abs(sup));
  }
  for (int s = 0; s < triples; ++s) {
    double a = rng.uniform(0.0, kTwoPi), b = rng.uniform(0.0, kTwoPi),
           c = rng.uniform(0.0, kTwoPi);
    const CirclePoint pa = circle_point(a), pb = circle_point(b), pc = circle_point(c);
    if (chordal(pa, pb) < 1e-6 || chordal(pb, pc) < 1e-6 || chordal(pa, pc) < 1e-6) continue;
    const double lhs = std::exp(m.log_dist(pa, pc));
    const double rhs = std::exp(m.log_dist(pa, pb)) + std::exp(m.log_dist(pb, pc));
    out.triangle_defect = std::max(out.triangle_defect, lhs - rhs);
  }
  return out;
}

struct DiskMetricSample {
  DiskMetric metric;
  int attempts = 0;
  int conjugation_iterations = 0;
  double fixed_point_residual = 0.0;
  DiskMetricSpotCheck checks;
};

inline std::optional<DiskMetricSample> sample_disk_metric(
    Rng& rng, int resolution = 2048, int max_attempts = 20, double amplitude = 0.35,
    double antipodal_tol = 1e-6, double triangle_tol = 1e-8) {
  const std::vector<double> cost_row = detail::antipodal_cost_row(resolution);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    // Draw U0 from the sinusoidal family. Even harmonics violate antipodality
    // at first order and get projected out by the conjugation; first harmonics
    // are absorbed by moving the basepoint. The interesting content sits in
    // the higher odd harmonics, capped so the triangle inequality survives.
    std::vector<SinTerm> terms;
    const double a1 = amplitude * rng.uniform(0.3, 0.8) * (rng.range(0, 1) ? 1 : -1);
    terms.push_back({1, a1, rng.uniform(0.0, kTwoPi)});
    terms.push_back(
        {3, rng.uniform(0.03, 0.08) * (rng.range(0, 1) ? 1 : -1), rng.uniform(0.0, kTwoPi)});
    if (rng.range(0, 1))
      terms.push_back({5, rng.uniform(-0.03, 0.03), rng.uniform(0.0, kTwoPi)});
    if (rng.range(0, 1))
      terms.push_back({2, rng.uniform(-0.04, 0.04), rng.uniform(0.0, kTwoPi)});

    std::vector<double> u(resolution);
    for (int i = 0; i < resolution; ++i) {
      const double th = kTwoPi * i / resolution;
      double v = 0.0;
      for (const auto& t : terms) v += t.a * std::sin(t.k * th + t.phi);
      u[i] = v;
    }

    double residual = 1e300;
    int iters = 0;
    for (; iters < 300; ++iters) {
      std::vector<double> conj = detail::antipodal_conjugate(u, cost_row);
      residual = 0.0;
      for (int i = 0; i < resolution; ++i) {
        residual = std::max(residual, std::abs(conj[i] - u[i]));
        u[i] = 0.5 * (u[i] + conj[i]);
      }
      if (residual <= 1e-10) break;
    }
    if (residual > 1e-10) continue;

    // evaluation between grid nodes goes through the conjugate transform, so
    // the antipodal identity survives off-grid
    auto ugrid = std::make_shared<std::vector<double>>(std::move(u));
    auto logf = [ugrid, resolution](double theta) {
      double best = 1e300;
      const auto& uu = *ugrid;
      for (int j = 0; j < resolution; ++j)
        best = std::min(best, detail::antipodal_cost(theta, kTwoPi * j / resolution) - uu[j]);
      return 2.0 * best;
    };
    DiskMetric metric = sampled_disk_metric(logf, resolution);

    DiskMetricSpotCheck checks = spot_check_disk_metric(metric, rng);
    if (checks.antipodal_defect > antipodal_tol || checks.triangle_defect > triangle_tol)
      continue;
    return DiskMetricSample{std::move(metric), attempt, iters, residual, checks};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Moebius extension on the disk: embed, push forward, project.

class MoebiusDiskExtension {
 public:
  static MoebiusDiskExtension from_matrix(const MoebiusDisk& m, int resolution = 1024) {
    return MoebiusDiskExtension(moebius_boundary_map(m),
                                moebius_boundary_map(m.inverse()), resolution);
  }

  // general boundary map; rejected unless it preserves cross-ratios
  static MoebiusDiskExtension from_map(const CircleMap& f, int resolution = 1024,
                                       double tol = 1e-9) {
    if (auto w = moebius_defect(f, tol))
      throw NotMoebiusError(
          "boundary map distorts cross-ratios by " +
              std::to_string(std::abs(w->source_log_cr - w->image_log_cr)),
          {std::to_string(w->quad[0]), std::to_string(w->quad[1]),
           std::to_string(w->quad[2]), std::to_string(w->quad[3])});
    return MoebiusDiskExtension(f, inverse_map(f), resolution);
  }

  const CircleMap& boundary_map() const { return f_; }
  const CircleMap& inverse_boundary_map() const { return finv_; }

  DiskMetric pushforward(const DiskMetric& rho) const {
    auto logf = [f = f_, finv = finv_, rho](double alpha) {
      const double t = finv.value(alpha);
      return rho.logf(t) - std::log(f.deriv(t));
    };
    return sampled_disk_metric(std::move(logf), static_cast<int>(rho.grid.size()));
  }

  DiskProjection project_image(const DiskPoint& x,
                               std::optional<DiskPoint> start = std::nullopt) const {
    const DiskMetric pushed = pushforward(embed_disk_point(x, resolution_));
    return project_disk_metric(pushed, start.value_or(disk_origin()));
  }

  DiskPoint map(const DiskPoint& x, std::optional<DiskPoint> start = std::nullopt) const {
    DiskProjection p = project_image(x, start);
    if (!p.converged)
      throw std::runtime_error("projection not converged after " +
                               std::to_string(p.iterations) + " iterations");
    return p.point;
  }

 private:
  MoebiusDiskExtension(CircleMap f, CircleMap finv, int resolution)
      : f_(std::move(f)), finv_(std::move(finv)), resolution_(resolution) {}

  CircleMap f_, finv_;
  int resolution_;
};

// ---------------------------------------------------------------------------
// Conformal (non-Moebius) extension: minimize the sup of |log df| over the
// basepoint of the image metric.

class ConformalExtension {
 public:
  explicit ConformalExtension(CircleMap f, int resolution = 1024, int sup_grid = 128)
      : f_(std::move(f)), resolution_(resolution), s_sup_(schwarzian_sup(f_, sup_grid)) {}

  double schwarzian_bound() const { return s_sup_; }

  struct Result {
    DiskPoint point;
    double conf_distance;  // sup |log df_{rho_x, rho_y}|
    int iterations;
    bool converged;
  };

  Result map(const DiskPoint& x, std::optional<DiskPoint> start = std::nullopt) const {
    // objective: sup over xi of -log df = [-log f'(xi) + log P(x, xi)] - log P(y, f xi)
    auto offset = [f = f_, x](double t) {
      return -std::log(f.deriv(t)) + log_poisson(x, circle_point(t));
    };
    auto image = [f = f_](double t) { return f.value(t); };
    MinimaxProblem p = minimax_problem(offset, image, resolution_);
    MinimaxResult r = minimax_boundary_descent(p, start.value_or(disk_origin()));
    const DiskPoint y = r.point;
    const double sup_abs = circle_sup(
        [&](double t) {
          return std::abs(log_conformal_derivative(f_, x, y, circle_point(t)));
        },
        resolution_);
    return {y, sup_abs, r.iterations, r.converged};
  }

 private:
  CircleMap f_;
  int resolution_;
  double s_sup_;
};

}  // namespace catb

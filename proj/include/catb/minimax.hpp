#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "disk.hpp"

namespace catb {

// Objective sup_theta [ offset(theta) - log P(y, image(theta)) ] to be
// minimized over y. offset and image are supplied both on a fixed grid and as
// pointwise evaluators for refinement; image gives the boundary direction the
// Poisson term looks at (identity for plain projections, the boundary map for
// conformal extensions).
struct MinimaxProblem {
  std::vector<double> offset_grid;
  std::vector<double> image_grid;  // angles
  std::function<double(double)> offset;
  std::function<double(double)> image;
};

inline MinimaxProblem minimax_problem(std::function<double(double)> offset,
                                      std::function<double(double)> image, int grid) {
  MinimaxProblem p;
  p.offset_grid.reserve(grid);
  p.image_grid.reserve(grid);
  for (int i = 0; i < grid; ++i) {
    const double t = kTwoPi * i / grid;
    p.offset_grid.push_back(offset(t));
    p.image_grid.push_back(image(t));
  }
  p.offset = std::move(offset);
  p.image = std::move(image);
  return p;
}

struct MinimaxOptions {
  int max_iterations = 3000;
  double initial_step = 1.0;
  double improvement_tol = 1e-8;
  double min_step = 1e-12;
  double active_window = 1e-4;  // peaks within this of the sup steer the step
  int stall_window = 100;       // stop when this many iterations make less
  double stall_tol = 1e-7;      // than stall_tol of cumulative progress
};

struct MinimaxResult {
  DiskPoint point;
  double value;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct SupResult {
  double value;
  std::vector<double> peak_angles;  // source angles of active peaks
};

inline double minimax_term(const MinimaxProblem& p, const DiskPoint& y, double theta) {
  return p.offset(theta) - log_poisson(y, circle_point(p.image(theta)));
}

inline SupResult minimax_sup(const MinimaxProblem& p, const DiskPoint& y,
                             double active_window) {
  const int n = static_cast<int>(p.offset_grid.size());
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i)
    vals[i] = p.offset_grid[i] - log_poisson(y, circle_point(p.image_grid[i]));

  // local maxima on the circular grid
  std::vector<int> peaks;
  double grid_max = vals[0];
  for (int i = 0; i < n; ++i) grid_max = std::max(grid_max, vals[i]);
  for (int i = 0; i < n; ++i) {
    const double prev = vals[(i + n - 1) % n], next = vals[(i + 1) % n];
    if (vals[i] >= prev && vals[i] >= next && vals[i] >= grid_max - 10.0 * active_window)
      peaks.push_back(i);
  }

  const double gr = 0.6180339887498949;
  const double cell = kTwoPi / n;
  SupResult out{grid_max, {}};
  std::vector<std::pair<double, double>> refined;  // (value, angle)
  for (int idx : peaks) {
    double lo = kTwoPi * idx / n - cell, hi = kTwoPi * idx / n + cell;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = minimax_term(p, y, x1), f2 = minimax_term(p, y, x2);
    for (int it = 0; it < 50; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = minimax_term(p, y, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = minimax_term(p, y, x1);
      }
    }
    const double t = 0.5 * (lo + hi);
    refined.emplace_back(minimax_term(p, y, t), t);
  }
  for (const auto& [v, t] : refined) out.value = std::max(out.value, v);
  for (const auto& [v, t] : refined)
    if (v >= out.value - active_window) out.peak_angles.push_back(t);
  if (out.peak_angles.empty()) out.peak_angles.push_back(0.0);
  return out;
}

}  // namespace detail

// Step toward the boundary directions realizing the sup, with halving line
// search. Stalls only where no first-order descent direction exists, which is
// exactly the minimax optimality condition.
inline MinimaxResult minimax_boundary_descent(const MinimaxProblem& p, DiskPoint start,
                                              const MinimaxOptions& opt = {}) {
  MinimaxResult res;
  res.point = start;
  double window = opt.active_window;
  detail::SupResult cur = detail::minimax_sup(p, res.point, window);
  res.value = cur.value;
  double step = opt.initial_step;
  double anchor_value = res.value;
  int anchor_it = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it;
    // sup-evaluation noise on spiky profiles can masquerade as progress
    if (it - anchor_it >= opt.stall_window) {
      if (anchor_value - res.value < opt.stall_tol) {
        res.converged = true;
        break;
      }
      anchor_value = res.value;
      anchor_it = it;
    }
    // combined direction toward the images of the active peaks, in the
    // tangent chart at the current point
    const MoebiusDisk t = MoebiusDisk::to_origin(res.point);
    Complex dir(0.0, 0.0);
    for (double a : cur.peak_angles)
      dir += t.apply(circle_point(p.image(a))).u;
    bool accepted = false;
    if (std::abs(dir) >= 1e-9) {
      dir /= std::abs(dir);
      while (step >= opt.min_step) {
        const double th = std::tanh(0.5 * step);
        const DiskPoint trial =
            t.inverse().apply(DiskPoint{th * dir, (1.0 - th) * (1.0 + th)});
        detail::SupResult snext = detail::minimax_sup(p, trial, window);
        if (snext.value < res.value) {
          accepted = true;
          const double gain = res.value - snext.value;
          res.point = trial;
          res.value = snext.value;
          cur = snext;
          // a microscopic gain at this step size says nothing about smaller
          // ones (overshoots land symmetrically), so squeeze rather than stop
          step = gain < opt.improvement_tol ? 0.5 * step
                                            : std::min(step * 2.0, opt.initial_step);
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted || step < opt.min_step) {
      // no progress along the tight active set: widen it (near-optimal peaks
      // zigzag otherwise), and stop once even the wide set gives nothing
      if (window < 0.05) {
        window *= 10.0;
        cur = detail::minimax_sup(p, res.point, window);
        step = std::max(step, 1e-6);
        continue;
      }
      res.converged = true;
      break;
    }
    window = opt.active_window;
  }
  return res;
}

}  // namespace catb

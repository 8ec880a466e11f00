#pragma once

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "boundary.hpp"  // ParseError
#include "disk.hpp"

namespace catb {

// Orientation-preserving circle homeomorphism with a positive derivative.
// value is a degree-one map of angles (any representative mod 2*pi).
struct CircleMap {
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  CirclePoint operator()(const CirclePoint& p) const { return circle_point(value(p.theta)); }
};

inline CircleMap identity_map() {
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

struct SinTerm {
  int k;
  double a;
  double phi;
};

inline double sinusoidal_budget(const std::vector<SinTerm>& terms) {
  double s = 0;
  for (const auto& t : terms) s += std::abs(t.k * t.a);
  return s;
}

// theta + sum a_k sin(k theta + phi_k); sum k|a_k| <= 0.9 keeps the
// derivative positive.
inline CircleMap sinusoidal_map(std::vector<SinTerm> terms) {
  for (const auto& t : terms)
    if (t.k < 1) throw std::invalid_argument("frequencies must be positive");
  if (sinusoidal_budget(terms) > 0.9)
    throw std::invalid_argument("sum k|a_k| exceeds 0.9; derivative not certifiably positive");
  auto value = [terms](double t) {
    double v = t;
    for (const auto& s : terms) v += s.a * std::sin(s.k * t + s.phi);
    return v;
  };
  auto deriv = [terms](double t) {
    double v = 1.0;
    for (const auto& s : terms) v += s.a * s.k * std::cos(s.k * t + s.phi);
    return v;
  };
  return {std::move(value), std::move(deriv)};
}

inline CircleMap moebius_boundary_map(const MoebiusDisk& m) {
  auto value = [m](double t) { return m.apply(circle_point(t)).theta; };
  auto deriv = [m](double t) { return m.boundary_derivative(circle_point(t)); };
  return {std::move(value), std::move(deriv)};
}

inline CircleMap compose_maps(const CircleMap& outer, const CircleMap& inner) {
  auto value = [outer, inner](double t) { return outer.value(inner.value(t)); };
  auto deriv = [outer, inner](double t) {
    return outer.deriv(inner.value(t)) * inner.deriv(t);
  };
  return {std::move(value), std::move(deriv)};
}

namespace detail {

// Monotone circular solve of f(theta) = target.
inline double solve_circle_map(const CircleMap& f, double target) {
  const int coarse = 64;
  double best_t = 0.0, best = 1e9;
  for (int i = 0; i < coarse; ++i) {
    const double t = kTwoPi * i / coarse;
    const double d = std::abs(circle_diff(f.value(t), target));
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 80; ++it) {
    const double d = circle_diff(f.value(t), target);
    if (std::abs(d) <= 1e-15) break;
    t -= d / f.deriv(t);
  }
  return circle_point(t).theta;
}

}  // namespace detail

inline CircleMap inverse_map(const CircleMap& f) {
  auto value = [f](double t) { return detail::solve_circle_map(f, t); };
  auto deriv = [f](double t) { return 1.0 / f.deriv(detail::solve_circle_map(f, t)); };
  return {std::move(value), std::move(deriv)};
}

// ---------------------------------------------------------------------------
// Diffeo file format:
//   diffeo v1
//   TERM <k> <a_k> <phi_k>

inline std::vector<SinTerm> parse_diffeo(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<SinTerm> terms;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(detail::strip_comment(line));
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "diffeo" || toks[1] != "v1")
        throw ParseError(lineno, "expected header 'diffeo v1'");
      have_header = true;
      continue;
    }
    if (toks[0] != "TERM" || toks.size() != 4)
      throw ParseError(lineno, "expected 'TERM <k> <a_k> <phi_k>'");
    try {
      terms.push_back({std::stoi(toks[1]), std::stod(toks[2]), std::stod(toks[3])});
    } catch (const std::exception&) {
      throw ParseError(lineno, "malformed TERM values");
    }
    if (terms.back().k < 1) throw ParseError(lineno, "frequency must be >= 1");
  }
  if (!have_header) throw ParseError(lineno, "missing header 'diffeo v1'");
  if (sinusoidal_budget(terms) > 0.9)
    throw ParseError(lineno, "sum k|a_k| exceeds 0.9");
  return terms;
}

inline void write_diffeo(std::ostream& out, const std::vector<SinTerm>& terms) {
  out << "diffeo v1\n";
  for (const auto& t : terms) out << "TERM " << t.k << ' ' << t.a << ' ' << t.phi << '\n';
}

}  // namespace catb

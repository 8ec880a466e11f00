#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interval.hpp"
#include "rational.hpp"

namespace catb {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

// Raised when a quantity that has to be choice-independent for Moebius
// equivalent metrics takes two different values; carries the witnessing points.
struct NotMoebiusError : std::runtime_error {
  std::vector<std::string> witness;
  NotMoebiusError(std::string what_, std::vector<std::string> witness_)
      : std::runtime_error(std::move(what_)), witness(std::move(witness_)) {}
};

// Ordered set of n >= 4 distinct boundary point labels.
struct FiniteBoundary {
  std::vector<std::string> labels;

  static FiniteBoundary of(std::vector<std::string> labels) {
    if (labels.size() < 4)
      throw std::invalid_argument("boundary needs at least four points, got " +
                                  std::to_string(labels.size()));
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("boundary labels must be pairwise distinct");
    return FiniteBoundary{std::move(labels)};
  }

  int size() const { return static_cast<int>(labels.size()); }

  int index(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
      if (labels[i] == label) return i;
    throw std::out_of_range("unknown boundary point '" + label + "'");
  }

  bool operator==(const FiniteBoundary&) const = default;
};

// Log-distances of a candidate metric on a finite boundary, as exact rationals
// (natural log of a distance; 0 means distance one). Construction only fixes
// the shape and symmetry; the metric axioms are the job of the validators so
// that rejected candidates can still be built and inspected.
class LogMetric {
 public:
  LogMetric(FiniteBoundary boundary, std::vector<Rational> upper)
      : boundary_(std::move(boundary)), upper_(std::move(upper)) {
    const int n = boundary_.size();
    if (static_cast<int>(upper_.size()) != n * (n - 1) / 2)
      throw std::invalid_argument("log metric table has the wrong size");
  }

  static LogMetric zero(FiniteBoundary boundary) {
    const int n = boundary.size();
    return LogMetric(std::move(boundary), std::vector<Rational>(n * (n - 1) / 2, Rational(0)));
  }

  const FiniteBoundary& boundary() const { return boundary_; }
  int size() const { return boundary_.size(); }

  const Rational& log_dist(int i, int j) const {
    if (i == j) throw std::domain_error("log distance of a point to itself is not stored");
    return upper_[pack(std::min(i, j), std::max(i, j))];
  }

  const Rational& log_dist(const std::string& a, const std::string& b) const {
    return log_dist(boundary_.index(a), boundary_.index(b));
  }

  const std::vector<Rational>& packed() const { return upper_; }

 private:
  int pack(int i, int j) const {
    const int n = boundary_.size();
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  }

  FiniteBoundary boundary_;
  std::vector<Rational> upper_;  // pairs (i < j), row-major
};

struct Violation {
  std::string property;
  std::vector<std::string> points;
  std::string detail;
};

struct Verdict {
  enum class Kind { member, violation, undecided };
  Kind kind = Kind::member;
  std::vector<Violation> issues;
  unsigned bits = 0;

  explicit operator bool() const { return kind == Kind::member; }

  std::string summary() const {
    if (kind == Kind::member) return "member";
    std::string s = kind == Kind::undecided ? "undecided at precision" : "violation";
    for (const auto& v : issues) {
      s += "; " + v.property;
      for (const auto& p : v.points) s += " " + p;
      if (!v.detail.empty()) s += " (" + v.detail + ")";
    }
    return s;
  }
};

// Diameter one, antipodality, and the triangle inequality (the latter decided
// by interval arithmetic at the given precision).
inline Verdict validate_log_metric(const LogMetric& m, unsigned bits = 128) {
  Verdict out;
  out.bits = bits;
  const auto& lab = m.boundary().labels;
  const int n = m.size();

  Rational max_entry = m.log_dist(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) max_entry = std::max(max_entry, m.log_dist(i, j));
  if (max_entry != 0) {
    out.kind = Verdict::Kind::violation;
    out.issues.push_back({"diameter-one", {}, "max log distance is " + to_fraction(max_entry)});
  }

  for (int i = 0; i < n; ++i) {
    bool has_antipode = false;
    for (int j = 0; j < n && !has_antipode; ++j)
      has_antipode = (j != i && m.log_dist(i, j) == 0);
    if (!has_antipode) {
      out.kind = Verdict::Kind::violation;
      out.issues.push_back({"antipodal", {lab[i]}, "no point at distance one"});
    }
  }

  bool undecided = false;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        Cert c = certify_exp_triangle(m.log_dist(i, k), m.log_dist(i, j), m.log_dist(j, k), bits);
        if (c == Cert::fails) {
          out.kind = Verdict::Kind::violation;
          out.issues.push_back({"triangle", {lab[i], lab[j], lab[k]}, ""});
        } else if (c == Cert::undecided) {
          undecided = true;
          out.issues.push_back({"triangle undecided", {lab[i], lab[j], lab[k]}, ""});
        }
      }
  if (undecided && out.kind == Verdict::Kind::member) out.kind = Verdict::Kind::undecided;
  return out;
}

// log [xi xi' eta eta'] = l(xi,eta) + l(xi',eta') - l(xi,eta') - l(xi',eta)
inline Rational cross_ratio_log(const LogMetric& m, int xi, int xi2, int eta, int eta2) {
  const std::array<int, 4> q{xi, xi2, eta, eta2};
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (q[a] == q[b]) throw std::domain_error("cross-ratio requires four distinct points");
  return m.log_dist(xi, eta) + m.log_dist(xi2, eta2) - m.log_dist(xi, eta2) -
         m.log_dist(xi2, eta);
}

inline Rational cross_ratio_log(const LogMetric& m, const std::array<std::string, 4>& quad) {
  const auto& b = m.boundary();
  return cross_ratio_log(m, b.index(quad[0]), b.index(quad[1]), b.index(quad[2]),
                         b.index(quad[3]));
}

// All cross-ratio logs of the candidate must agree exactly with the base's, on
// top of the metric invariants above.
inline Verdict validate_membership(const LogMetric& candidate, const LogMetric& base,
                                   unsigned bits = 128) {
  if (!(candidate.boundary() == base.boundary()))
    throw std::invalid_argument("candidate and base live on different boundaries");
  Verdict out = validate_log_metric(candidate, bits);
  const auto& lab = candidate.boundary().labels;
  const int n = candidate.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          // the three pairings of {a,b,c,d}; the rest differ by sign or swap
          const std::array<std::array<int, 4>, 3> quads{
              {{a, b, c, d}, {a, c, b, d}, {a, d, b, c}}};
          for (const auto& q : quads) {
            Rational lhs = cross_ratio_log(candidate, q[0], q[1], q[2], q[3]);
            Rational rhs = cross_ratio_log(base, q[0], q[1], q[2], q[3]);
            if (lhs != rhs) {
              out.kind = Verdict::Kind::violation;
              out.issues.push_back({"cross-ratio",
                                    {lab[q[0]], lab[q[1]], lab[q[2]], lab[q[3]]},
                                    to_fraction(lhs) + " vs " + to_fraction(rhs)});
            }
          }
        }
  return out;
}

// log d(rho2)/d(rho1) at xi, evaluated over every admissible pair (eta, eta')
// and required to agree; disagreement means the metrics are not Moebius
// equivalent.
inline Rational derivative_log(const LogMetric& rho2, const LogMetric& rho1, int xi) {
  if (!(rho2.boundary() == rho1.boundary()))
    throw std::invalid_argument("derivative of metrics on different boundaries");
  const int n = rho1.size();
  if (n < 3) throw std::domain_error("derivative needs at least three points");
  const auto& lab = rho1.boundary().labels;
  bool have = false;
  Rational value;
  for (int e1 = 0; e1 < n; ++e1) {
    if (e1 == xi) continue;
    for (int e2 = e1 + 1; e2 < n; ++e2) {
      if (e2 == xi) continue;
      Rational v = rho2.log_dist(xi, e1) + rho2.log_dist(xi, e2) + rho1.log_dist(e1, e2) -
                   rho1.log_dist(xi, e1) - rho1.log_dist(xi, e2) - rho2.log_dist(e1, e2);
      if (!have) {
        value = v;
        have = true;
      } else if (v != value) {
        throw NotMoebiusError("derivative at " + lab[xi] + " is not well-defined: " +
                                  to_fraction(value) + " vs " + to_fraction(v) +
                                  " (not Moebius equivalent)",
                              {lab[xi], lab[e1], lab[e2]});
      }
    }
  }
  return value;
}

inline Rational derivative_log(const LogMetric& rho2, const LogMetric& rho1,
                               const std::string& xi) {
  return derivative_log(rho2, rho1, rho1.boundary().index(xi));
}

// Coordinates of rho in the sup-norm embedding anchored at base.
inline std::vector<Rational> embed_coordinates(const LogMetric& rho, const LogMetric& base) {
  std::vector<Rational> out;
  out.reserve(rho.size());
  for (int i = 0; i < rho.size(); ++i) out.push_back(derivative_log(rho, base, i));
  return out;
}

// d_M: the max of the derivative log (the min is its negative for members).
inline Rational class_distance(const LogMetric& rho1, const LogMetric& rho2) {
  Rational best = derivative_log(rho2, rho1, 0);
  for (int i = 1; i < rho1.size(); ++i) best = std::max(best, derivative_log(rho2, rho1, i));
  return best;
}

// Candidate with log distances base + (logf_i + logf_j)/2. Membership is not
// guaranteed; callers validate.
inline LogMetric conformal_scale(const LogMetric& base, const std::vector<Rational>& logf) {
  const int n = base.size();
  if (static_cast<int>(logf.size()) != n)
    throw std::invalid_argument("conformal factor must be indexed by the boundary");
  std::vector<Rational> upper;
  upper.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      upper.push_back(base.log_dist(i, j) + (logf[i] + logf[j]) / 2);
  return LogMetric(base.boundary(), std::move(upper));
}

// ---------------------------------------------------------------------------
// Metric file format:
//   logmetric v1
//   POINTS <label> <label> ...
//   D <i-label> <j-label> <p>/<q>     # one line per unordered pair, value <= 0

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace detail

inline LogMetric parse_log_metric(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<std::string> labels;
  std::vector<std::pair<bool, Rational>> table;
  auto pack = [&](int i, int j) {
    const int n = static_cast<int>(labels.size());
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(detail::strip_comment(line));
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "logmetric" || toks[1] != "v1")
        throw ParseError(lineno, "expected header 'logmetric v1'");
      have_header = true;
      continue;
    }
    if (toks[0] == "POINTS") {
      if (!labels.empty()) throw ParseError(lineno, "duplicate POINTS line");
      labels.assign(toks.begin() + 1, toks.end());
      if (labels.size() < 4) throw ParseError(lineno, "need at least four points");
      table.assign(labels.size() * (labels.size() - 1) / 2, {false, Rational(0)});
    } else if (toks[0] == "D") {
      if (labels.empty()) throw ParseError(lineno, "D before POINTS");
      if (toks.size() != 4) throw ParseError(lineno, "expected 'D <i> <j> <p>/<q>'");
      auto find = [&](const std::string& l) {
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels[i] == l) return static_cast<int>(i);
        throw ParseError(lineno, "unknown point '" + l + "'");
      };
      int i = find(toks[1]), j = find(toks[2]);
      if (i == j) throw ParseError(lineno, "distance of a point to itself");
      Rational v;
      try {
        v = parse_fraction(toks[3]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
      if (v > 0) throw ParseError(lineno, "log distance must be <= 0");
      auto& slot = table[pack(i, j)];
      if (slot.first) throw ParseError(lineno, "pair set twice");
      slot = {true, v};
    } else {
      throw ParseError(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "missing header 'logmetric v1'");
  if (labels.empty()) throw ParseError(lineno, "missing POINTS line");
  std::vector<Rational> upper;
  upper.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!table[i].first) throw ParseError(lineno, "incomplete distance table");
    upper.push_back(table[i].second);
  }
  return LogMetric(FiniteBoundary::of(labels), std::move(upper));
}

inline void write_log_metric(std::ostream& out, const LogMetric& m) {
  out << "logmetric v1\nPOINTS";
  for (const auto& l : m.boundary().labels) out << ' ' << l;
  out << '\n';
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out << "D " << m.boundary().labels[i] << ' ' << m.boundary().labels[j] << ' '
          << to_fraction(m.log_dist(i, j)) << '\n';
}

}  // namespace catb

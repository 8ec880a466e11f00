#pragma once

#include <optional>
#include <variant>

#include "tree.hpp"

namespace catb {

struct MembershipRejected : std::runtime_error {
  Verdict verdict;
  explicit MembershipRejected(Verdict v)
      : std::runtime_error("metric rejected: " + v.summary()), verdict(std::move(v)) {}
};

// Anchor for embedding coordinates.
inline TreePoint tree_basepoint(const TreeSpace& t) { return vertex_point(t, 0); }

struct TreeProjection {
  TreePoint point;
  Rational gap;
};

// Nearest visual metric to rho, found exactly: on every segment the distance
// to rho is a max of affine functions of arclength with slopes +-1, so the
// minimum is attained at a segment endpoint or where two slopes cross.
inline TreeProjection project_metric_tree(const TreeSpace& t, const LogMetric& rho,
                                          unsigned bits = 128) {
  const TreePoint x0 = tree_basepoint(t);
  const LogMetric base = visual_log_metric(t, x0);
  Verdict verdict = validate_membership(rho, base, bits);
  if (!verdict) throw MembershipRejected(std::move(verdict));

  const std::vector<Rational> e = embed_coordinates(rho, base);
  const int n = t.end_count();

  std::optional<TreeProjection> best;
  auto consider = [&](int seg, const Rational& off, const Rational& value) {
    TreePoint p = canonical_point(t, {seg, off});
    if (!best || value < best->gap ||
        (value == best->gap && (p.segment < best->point.segment ||
                                (p.segment == best->point.segment &&
                                 p.offset < best->point.offset)))) {
      best = TreeProjection{p, value};
    }
  };

  for (int seg = 0; seg < t.segment_count(); ++seg) {
    const TreePoint start{seg, Rational(0)};
    // c_xi = value of log d(rho)/d(rho_x) at the segment start
    std::vector<Rational> c(n);
    for (int i = 0; i < n; ++i) c[i] = e[i] - busemann_log(t, i, x0, start);

    std::optional<Rational> ahead, behind;  // max of c over ends in front / behind
    if (t.segment_is_ray(seg)) {
      const int own = t.ray_index(seg);
      for (int i = 0; i < n; ++i) {
        auto& side = (i == own) ? ahead : behind;
        side = side ? std::max(*side, c[i]) : c[i];
      }
    } else {
      const auto& ed = t.edge(seg);
      for (int i = 0; i < n; ++i) {
        const int attach = t.ray(t.ray_segment(i)).attach;
        const bool via_v = t.vertex_distance(ed.u, attach) > t.vertex_distance(ed.v, attach);
        auto& side = via_v ? ahead : behind;
        side = side ? std::max(*side, c[i]) : c[i];
      }
    }
    // geodesic completeness guarantees ends on both sides of every segment
    const Rational A = *ahead, B = *behind;

    auto value_at = [&](const Rational& s) { return std::max(A - s, B + s); };
    Rational cross = (A - B) / 2;
    if (t.segment_is_ray(seg)) {
      Rational s = std::max(Rational(0), cross);
      consider(seg, s, value_at(s));
    } else {
      const Rational L = t.edge(seg).length;
      consider(seg, Rational(0), value_at(Rational(0)));
      consider(seg, L, value_at(L));
      if (cross > 0 && cross < L) consider(seg, cross, value_at(cross));
    }
  }
  return *best;
}

// Bijection between the ends of two trees, by end index.
struct EndBijection {
  std::vector<int> to;

  static EndBijection from_labels(const TreeSpace& a, const TreeSpace& b,
                                  const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (a.end_count() != b.end_count() ||
        static_cast<int>(pairs.size()) != a.end_count())
      throw std::invalid_argument("end bijection must cover all ends of both trees");
    EndBijection f;
    f.to.assign(a.end_count(), -1);
    std::vector<char> hit(b.end_count(), 0);
    for (const auto& [from, to] : pairs) {
      int i = a.end_index(from), j = b.end_index(to);
      if (f.to[i] >= 0 || hit[j]) throw std::invalid_argument("end mapped twice");
      f.to[i] = j;
      hit[j] = 1;
    }
    return f;
  }

  std::vector<int> inverse() const {
    std::vector<int> inv(to.size(), -1);
    for (std::size_t i = 0; i < to.size(); ++i) inv[to[i]] = static_cast<int>(i);
    return inv;
  }
};

// Entries of rho read through the inverse end map.
inline LogMetric pushforward_log_metric(const EndBijection& f, const LogMetric& rho,
                                        const FiniteBoundary& target) {
  const int n = rho.size();
  if (static_cast<int>(f.to.size()) != n || target.size() != n)
    throw std::invalid_argument("bijection does not match the boundaries");
  const std::vector<int> inv = f.inverse();
  std::vector<Rational> upper;
  upper.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper.push_back(rho.log_dist(inv[i], inv[j]));
  return LogMetric(target, std::move(upper));
}

struct CrossRatioWitness {
  std::array<std::string, 4> quad;
  Rational source, image;
};

// Extension of a cross-ratio-preserving end bijection to a tree isometry,
// evaluated pointwise through the nearest-visual-metric projection.
class TreeIsometry {
 public:
  TreeIsometry(TreeSpace a, TreeSpace b, EndBijection f, unsigned bits)
      : a_(std::move(a)), b_(std::move(b)), f_(std::move(f)), bits_(bits),
        target_(b_.boundary()) {}

  const TreeSpace& source() const { return a_; }
  const TreeSpace& target() const { return b_; }
  const EndBijection& boundary_map() const { return f_; }

  TreePoint map(const TreePoint& x) const {
    LogMetric pushed = pushforward_log_metric(f_, visual_log_metric(a_, x), target_);
    TreeProjection pr = project_metric_tree(b_, pushed, bits_);
    if (pr.gap != 0)
      throw std::runtime_error("surjectivity violation: projection gap " +
                               to_fraction(pr.gap));
    return pr.point;
  }

  // exact distance preservation for one pair
  bool preserves(const TreePoint& x, const TreePoint& y) const {
    return tree_distance(b_, map(x), map(y)) == tree_distance(a_, x, y);
  }

 private:
  TreeSpace a_, b_;
  EndBijection f_;
  unsigned bits_;
  FiniteBoundary target_;
};

inline std::variant<TreeIsometry, CrossRatioWitness> tree_moebius_extend(
    const TreeSpace& a, const TreeSpace& b, const EndBijection& f, unsigned bits = 128) {
  if (a.end_count() != b.end_count())
    throw std::invalid_argument("trees with different numbers of ends");
  const LogMetric ra = visual_log_metric(a, tree_basepoint(a));
  const LogMetric rb = visual_log_metric(b, tree_basepoint(b));
  const int n = a.end_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const std::array<std::array<int, 4>, 3> quads{
              {{i, j, k, l}, {i, k, j, l}, {i, l, j, k}}};
          for (const auto& q : quads) {
            Rational lhs = cross_ratio_log(ra, q[0], q[1], q[2], q[3]);
            Rational rhs =
                cross_ratio_log(rb, f.to[q[0]], f.to[q[1]], f.to[q[2]], f.to[q[3]]);
            if (lhs != rhs)
              return CrossRatioWitness{{a.end_labels()[q[0]], a.end_labels()[q[1]],
                                        a.end_labels()[q[2]], a.end_labels()[q[3]]},
                                       lhs, rhs};
          }
        }
  return TreeIsometry(a, b, f, bits);
}

}  // namespace catb

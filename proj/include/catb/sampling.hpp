#pragma once

#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "tree.hpp"
#include "tree_extension.hpp"

namespace catb {

// Random finite-core tree with 4..max_ends ends and rational edge lengths;
// rays are first added where geodesic completeness requires them, then padded
// to the drawn end count.
inline TreeSpace random_tree(Rng& rng, int max_ends = 8) {
  const int v = rng.range(1, 5);
  std::vector<std::string> vertices;
  std::vector<std::tuple<std::string, std::string, Rational>> edges;
  for (int i = 0; i < v; ++i) vertices.push_back("v" + std::to_string(i));
  std::vector<int> degree(v, 0);
  for (int i = 1; i < v; ++i) {
    const int parent = rng.range(0, i - 1);
    edges.emplace_back(vertices[parent], vertices[i], rng.positive_rational(4, 3));
    ++degree[parent];
    ++degree[i];
  }
  std::vector<std::pair<std::string, std::string>> ends;
  auto add_end = [&](int at) {
    ends.emplace_back("e" + std::to_string(ends.size() + 1), vertices[at]);
    ++degree[at];
  };
  for (int i = 0; i < v; ++i)
    while (degree[i] < 2) add_end(i);
  const int target = std::max(static_cast<int>(ends.size()), rng.range(4, max_ends));
  while (static_cast<int>(ends.size()) < target) add_end(rng.range(0, v - 1));
  return TreeSpace::build(std::move(vertices), std::move(edges), std::move(ends));
}

inline TreePoint random_tree_point(const TreeSpace& t, Rng& rng) {
  const int seg = rng.range(0, t.segment_count() - 1);
  Rational off = t.segment_is_ray(seg)
                     ? rng.rational_in(Rational(0), Rational(7, 2), 28)
                     : rng.rational_in(Rational(0), t.edge(seg).length, 24);
  return canonical_point(t, {seg, off});
}

// Member of the metric class, built through the conformal-scale route from
// Busemann increments toward a random target point (so construction and the
// visual-metric route can be checked against each other).
inline LogMetric random_member(const TreeSpace& t, Rng& rng, TreePoint* target = nullptr) {
  const TreePoint x0 = tree_basepoint(t);
  const TreePoint x = random_tree_point(t, rng);
  std::vector<Rational> logf;
  logf.reserve(t.end_count());
  for (int i = 0; i < t.end_count(); ++i) logf.push_back(busemann_log(t, i, x0, x));
  if (target) *target = x;
  return conformal_scale(visual_log_metric(t, x0), logf);
}

// Reproducer: the tree in its file format plus point coordinates.
inline std::string describe_tree_case(const TreeSpace& t,
                                      const std::vector<TreePoint>& points) {
  std::ostringstream out;
  write_tree(out, t);
  for (const auto& p : points)
    out << "# point segment=" << p.segment << " offset=" << to_fraction(p.offset) << '\n';
  return out.str();
}

// Relabeled copy of a tree with shuffled declaration order; returns the copy
// and the induced end bijection (an isometry by construction).
inline std::pair<TreeSpace, EndBijection> shuffled_copy(const TreeSpace& t, Rng& rng) {
  const int v = t.vertex_count();
  std::vector<int> vperm(v);
  for (int i = 0; i < v; ++i) vperm[i] = i;
  for (int i = v - 1; i > 0; --i) std::swap(vperm[i], vperm[rng.range(0, i)]);
  std::vector<std::string> vertices(v);
  for (int i = 0; i < v; ++i) vertices[vperm[i]] = "w" + std::to_string(vperm[i]);

  std::vector<std::tuple<std::string, std::string, Rational>> edges;
  for (int e = 0; e < t.edge_count(); ++e)
    edges.emplace_back(vertices[vperm[t.edge(e).u]], vertices[vperm[t.edge(e).v]],
                       t.edge(e).length);
  for (int i = static_cast<int>(edges.size()) - 1; i > 0; --i)
    std::swap(edges[i], edges[rng.range(0, i)]);

  const int n = t.end_count();
  std::vector<int> eperm(n);
  for (int i = 0; i < n; ++i) eperm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(eperm[i], eperm[rng.range(0, i)]);
  std::vector<std::pair<std::string, std::string>> ends(n);
  for (int i = 0; i < n; ++i)
    ends[eperm[i]] = {"f" + std::to_string(eperm[i]),
                      vertices[vperm[t.ray(t.ray_segment(i)).attach]]};

  TreeSpace copy = TreeSpace::build(std::move(vertices), std::move(edges), std::move(ends));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < n; ++i)
    pairs.emplace_back(t.end_labels()[i], "f" + std::to_string(eperm[i]));
  EndBijection f = EndBijection::from_labels(t, copy, pairs);
  return {std::move(copy), std::move(f)};
}

}  // namespace catb

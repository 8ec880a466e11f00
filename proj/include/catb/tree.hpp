#pragma once

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "rational.hpp"

namespace catb {

// Finite-core geodesically complete metric tree: a finite edge-weighted tree
// plus rays (isometric copies of [0, inf)) hung on vertices. Segments are
// numbered edges first, then rays. Immutable after build().
class TreeSpace {
 public:
  struct Edge {
    int u, v;
    Rational length;
  };
  struct Ray {
    int attach;
  };

  static TreeSpace build(std::vector<std::string> vertex_labels,
                         std::vector<std::tuple<std::string, std::string, Rational>> edges,
                         std::vector<std::pair<std::string, std::string>> ends) {
    TreeSpace t;
    t.vertex_labels_ = std::move(vertex_labels);
    if (t.vertex_labels_.empty()) throw std::invalid_argument("tree needs at least one vertex");
    {
      auto sorted = t.vertex_labels_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate vertex label");
    }
    for (const auto& [ul, vl, len] : edges) {
      if (len <= 0) throw std::invalid_argument("edge length must be positive");
      t.edges_.push_back({t.vertex_index(ul), t.vertex_index(vl), len});
    }
    for (const auto& [end_label, attach] : ends) {
      t.end_labels_.push_back(end_label);
      t.rays_.push_back({t.vertex_index(attach)});
    }
    {
      auto sorted = t.end_labels_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate end label");
    }
    t.validate();
    t.index();
    return t;
  }

  int vertex_count() const { return static_cast<int>(vertex_labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int end_count() const { return static_cast<int>(rays_.size()); }
  int segment_count() const { return edge_count() + end_count(); }
  bool segment_is_ray(int seg) const { return seg >= edge_count(); }
  const Edge& edge(int seg) const { return edges_[seg]; }
  const Ray& ray(int seg) const { return rays_[seg - edge_count()]; }
  int ray_index(int seg) const { return seg - edge_count(); }
  int ray_segment(int end) const { return edge_count() + end; }

  const std::vector<std::string>& vertex_labels() const { return vertex_labels_; }
  const std::vector<std::string>& end_labels() const { return end_labels_; }

  int vertex_index(const std::string& label) const {
    for (int i = 0; i < vertex_count(); ++i)
      if (vertex_labels_[i] == label) return i;
    throw std::out_of_range("unknown vertex '" + label + "'");
  }

  int end_index(const std::string& label) const {
    for (int i = 0; i < end_count(); ++i)
      if (end_labels_[i] == label) return i;
    throw std::out_of_range("unknown end '" + label + "'");
  }

  FiniteBoundary boundary() const { return FiniteBoundary::of(end_labels_); }

  const Rational& vertex_distance(int u, int v) const { return vdist_[u][v]; }

  // lowest incident segment id and whether the vertex sits at its far end
  std::pair<int, bool> canonical_segment(int vertex) const { return vcanon_[vertex]; }

  Rational core_size() const {
    Rational s(0);
    for (const auto& e : edges_) s += e.length;
    return s;
  }

 private:
  void validate() const {
    if (end_count() < 4) throw std::invalid_argument("tree needs at least four ends");
    const int V = vertex_count();
    if (edge_count() != V - 1)
      throw std::invalid_argument("edge count must be one less than vertex count (tree)");
    std::vector<std::vector<int>> adj(V);
    for (const auto& e : edges_) {
      if (e.u == e.v) throw std::invalid_argument("self-loop edge");
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(V, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int w = q.front();
      q.pop();
      for (int x : adj[w])
        if (!seen[x]) {
          seen[x] = 1;
          ++reached;
          q.push(x);
        }
    }
    if (reached != V) throw std::invalid_argument("tree is not connected");
    std::vector<int> degree(V, 0);
    for (const auto& e : edges_) {
      ++degree[e.u];
      ++degree[e.v];
    }
    for (const auto& r : rays_) ++degree[r.attach];
    for (int v = 0; v < V; ++v)
      if (degree[v] < 2)
        throw std::invalid_argument("vertex '" + vertex_labels_[v] +
                                    "' has degree < 2 (tree not geodesically complete)");
  }

  void index() {
    const int V = vertex_count();
    std::vector<std::vector<std::pair<int, Rational>>> adj(V);
    for (int e = 0; e < edge_count(); ++e) {
      adj[edges_[e].u].push_back({edges_[e].v, edges_[e].length});
      adj[edges_[e].v].push_back({edges_[e].u, edges_[e].length});
    }
    vdist_.assign(V, std::vector<Rational>(V, Rational(0)));
    for (int s = 0; s < V; ++s) {
      std::vector<char> seen(V, 0);
      std::queue<int> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty()) {
        int w = q.front();
        q.pop();
        for (const auto& [x, len] : adj[w])
          if (!seen[x]) {
            seen[x] = 1;
            vdist_[s][x] = vdist_[s][w] + len;
            q.push(x);
          }
      }
    }
    vcanon_.assign(V, {-1, false});
    for (int s = 0; s < segment_count(); ++s) {
      if (segment_is_ray(s)) {
        int a = ray(s).attach;
        if (vcanon_[a].first < 0) vcanon_[a] = {s, false};
      } else {
        if (vcanon_[edge(s).u].first < 0) vcanon_[edge(s).u] = {s, false};
        if (vcanon_[edge(s).v].first < 0) vcanon_[edge(s).v] = {s, true};
      }
    }
  }

  std::vector<std::string> vertex_labels_;
  std::vector<Edge> edges_;
  std::vector<Ray> rays_;
  std::vector<std::string> end_labels_;
  std::vector<std::vector<Rational>> vdist_;
  std::vector<std::pair<int, bool>> vcanon_;
};

// Point addressed as (segment, offset along it); offset runs from the edge's u
// (or the ray's attach vertex) toward v (or the end).
struct TreePoint {
  int segment;
  Rational offset;
};

inline void check_point(const TreeSpace& t, const TreePoint& p) {
  if (p.segment < 0 || p.segment >= t.segment_count())
    throw std::domain_error("invalid segment id " + std::to_string(p.segment));
  if (p.offset < 0) throw std::domain_error("negative offset");
  if (!t.segment_is_ray(p.segment) && p.offset > t.edge(p.segment).length)
    throw std::domain_error("offset beyond edge length");
}

inline TreePoint vertex_point(const TreeSpace& t, int vertex) {
  auto [seg, far] = t.canonical_segment(vertex);
  return {seg, far ? t.edge(seg).length : Rational(0)};
}

// Vertex points snap to the lowest incident segment id.
inline TreePoint canonical_point(const TreeSpace& t, TreePoint p) {
  check_point(t, p);
  if (t.segment_is_ray(p.segment)) {
    if (p.offset == 0) return vertex_point(t, t.ray(p.segment).attach);
    return p;
  }
  if (p.offset == 0) return vertex_point(t, t.edge(p.segment).u);
  if (p.offset == t.edge(p.segment).length) return vertex_point(t, t.edge(p.segment).v);
  return p;
}

inline bool same_point(const TreeSpace& t, const TreePoint& a, const TreePoint& b) {
  TreePoint ca = canonical_point(t, a), cb = canonical_point(t, b);
  return ca.segment == cb.segment && ca.offset == cb.offset;
}

inline Rational vertex_point_distance(const TreeSpace& t, int w, const TreePoint& p) {
  if (t.segment_is_ray(p.segment))
    return t.vertex_distance(w, t.ray(p.segment).attach) + p.offset;
  const auto& e = t.edge(p.segment);
  return std::min(t.vertex_distance(w, e.u) + p.offset,
                  t.vertex_distance(w, e.v) + e.length - p.offset);
}

inline Rational tree_distance(const TreeSpace& t, const TreePoint& a, const TreePoint& b) {
  check_point(t, a);
  check_point(t, b);
  if (a.segment == b.segment) return abs(a.offset - b.offset);
  // the arc enters b's segment through one of its endpoint vertices
  if (t.segment_is_ray(b.segment))
    return vertex_point_distance(t, t.ray(b.segment).attach, a) + b.offset;
  const auto& e = t.edge(b.segment);
  return std::min(vertex_point_distance(t, e.u, a) + b.offset,
                  vertex_point_distance(t, e.v, a) + e.length - b.offset);
}

// A point on the ray to the given end, far enough to lie beyond any branching
// relevant to x (offsets stabilize all confluence computations involving x).
inline TreePoint far_ray_point(const TreeSpace& t, int end, const TreePoint& x) {
  const int seg = t.ray_segment(end);
  Rational off = tree_distance(t, x, TreePoint{seg, Rational(0)}) + 1;
  return {seg, off};
}

// Distance from x to the confluence of the rays [x, end_i) and [x, end_j).
inline Rational gromov_product(const TreeSpace& t, const TreePoint& x, int end_i, int end_j) {
  if (end_i == end_j) throw std::domain_error("Gromov product of an end with itself");
  TreePoint a = far_ray_point(t, end_i, x);
  TreePoint b = far_ray_point(t, end_j, x);
  return (tree_distance(t, x, a) + tree_distance(t, x, b) - tree_distance(t, a, b)) / 2;
}

// Visual metric based at x, stored in the log domain.
inline LogMetric visual_log_metric(const TreeSpace& t, const TreePoint& x) {
  const int n = t.end_count();
  std::vector<Rational> upper;
  upper.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper.push_back(-gromov_product(t, x, i, j));
  return LogMetric(t.boundary(), std::move(upper));
}

// B(end, x, y) = d(x, a) - d(y, a) for a far out on the ray to the end; the
// value is exact once a passes both projections.
inline Rational busemann_log(const TreeSpace& t, int end, const TreePoint& x,
                             const TreePoint& y) {
  const int seg = t.ray_segment(end);
  const TreePoint base{seg, Rational(0)};
  Rational off =
      std::max(tree_distance(t, x, base), tree_distance(t, y, base)) + 1;
  TreePoint a{seg, off};
  return tree_distance(t, x, a) - tree_distance(t, y, a);
}

// ---------------------------------------------------------------------------
// Tree file format:
//   tree v1
//   VERTEX <label>
//   EDGE <u> <v> <p>/<q>
//   END <end-label> AT <vertex>

inline TreeSpace parse_tree(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<std::string> vertices;
  std::vector<std::tuple<std::string, std::string, Rational>> edges;
  std::vector<std::pair<std::string, std::string>> ends;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(detail::strip_comment(line));
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "tree" || toks[1] != "v1")
        throw ParseError(lineno, "expected header 'tree v1'");
      have_header = true;
      continue;
    }
    if (toks[0] == "VERTEX" && toks.size() == 2) {
      vertices.push_back(toks[1]);
    } else if (toks[0] == "EDGE" && toks.size() == 4) {
      Rational len;
      try {
        len = parse_fraction(toks[3]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
      if (len <= 0) throw ParseError(lineno, "edge length must be positive");
      edges.emplace_back(toks[1], toks[2], len);
    } else if (toks[0] == "END" && toks.size() == 4 && toks[2] == "AT") {
      ends.emplace_back(toks[1], toks[3]);
    } else {
      throw ParseError(lineno, "unknown or malformed directive '" + toks[0] + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "missing header 'tree v1'");
  try {
    return TreeSpace::build(std::move(vertices), std::move(edges), std::move(ends));
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(lineno, e.what());
  }
}

inline void write_tree(std::ostream& out, const TreeSpace& t) {
  out << "tree v1\n";
  for (const auto& v : t.vertex_labels()) out << "VERTEX " << v << '\n';
  for (int e = 0; e < t.edge_count(); ++e)
    out << "EDGE " << t.vertex_labels()[t.edge(e).u] << ' ' << t.vertex_labels()[t.edge(e).v]
        << ' ' << to_fraction(t.edge(e).length) << '\n';
  for (int r = 0; r < t.end_count(); ++r)
    out << "END " << t.end_labels()[r] << " AT "
        << t.vertex_labels()[t.ray(t.ray_segment(r)).attach] << '\n';
}

}  // namespace catb

#include <catch2/catch_amalgamated.hpp>

#include <catb/sampling.hpp>
#include <catb/tree.hpp>
#include <catb/tree_extension.hpp>

#include <sstream>

using namespace catb;

namespace {

TreeSpace spider() {
  return TreeSpace::build({"c"}, {},
                          {{"e1", "c"}, {"e2", "c"}, {"e3", "c"}, {"e4", "c"}});
}

TreeSpace htree(const Rational& bar) {
  return TreeSpace::build({"u", "v"}, {{"u", "v", bar}},
                          {{"a", "u"}, {"b", "u"}, {"c", "v"}, {"d", "v"}});
}

// Independent confluence oracle: materialize the arc from x toward an end as
// the sequence of (point, running length) stops, then measure the common
// prefix of two arcs by scanning their stops. Exercises none of the
// distance-formula shortcuts used by gromov_product.
struct ArcStop {
  TreePoint at;
  Rational reach;  // arclength from x
};

std::vector<ArcStop> arc_to_end(const TreeSpace& t, const TreePoint& x0, int end) {
  const int seg = t.ray_segment(end);
  const TreePoint far = far_ray_point(t, end, x0);
  const TreePoint x = canonical_point(t, x0);
  std::vector<ArcStop> stops{{x, Rational(0)}};
  if (x.segment == seg) {  // already on the target ray
    stops.push_back({far, abs(far.offset - x.offset)});
    return stops;
  }
  const int attach = t.ray(seg).attach;
  // leave x's segment through the endpoint closer to the attach vertex
  int wv;
  Rational walked;
  if (t.segment_is_ray(x.segment)) {
    wv = t.ray(x.segment).attach;
    walked = x.offset;
  } else {
    const auto& e = t.edge(x.segment);
    const Rational via_u = x.offset + t.vertex_distance(e.u, attach);
    const Rational via_v = e.length - x.offset + t.vertex_distance(e.v, attach);
    wv = via_u <= via_v ? e.u : e.v;
    walked = via_u <= via_v ? x.offset : e.length - x.offset;
  }
  stops.push_back({vertex_point(t, wv), walked});
  // vertex-to-vertex walk along the unique path to the attach vertex
  while (wv != attach) {
    int next = -1;
    Rational len;
    for (int e = 0; e < t.edge_count() && next < 0; ++e) {
      const auto& ed = t.edge(e);
      const int other = ed.u == wv ? ed.v : (ed.v == wv ? ed.u : -1);
      if (other < 0) continue;
      if (t.vertex_distance(wv, attach) == ed.length + t.vertex_distance(other, attach)) {
        next = other;
        len = ed.length;
      }
    }
    REQUIRE(next >= 0);
    walked += len;
    wv = next;
    stops.push_back({vertex_point(t, wv), walked});
  }
  stops.push_back({far, walked + far.offset});
  return stops;
}

Rational gromov_oracle(const TreeSpace& t, const TreePoint& x, int ei, int ej) {
  const auto a = arc_to_end(t, x, ei);
  const auto b = arc_to_end(t, x, ej);
  // longest reach r such that both arcs pass through the same point at r
  Rational best(0);
  for (const auto& sa : a)
    for (const auto& sb : b)
      if (sa.reach == sb.reach && same_point(t, sa.at, sb.at)) best = std::max(best, sa.reach);
  return best;
}

}  // namespace

TEST_CASE("tree construction rejects invalid inputs") {
  CHECK_THROWS_AS(TreeSpace::build({"a", "b"}, {{"a", "b", Rational(1)}},
                                   {{"e1", "a"}, {"e2", "b"}, {"e3", "a"}}),
                  std::invalid_argument);  // three ends
  CHECK_THROWS_AS(TreeSpace::build({"a"}, {}, {{"e1", "a"}, {"e1", "a"},
                                               {"e2", "a"}, {"e3", "a"}}),
                  std::invalid_argument);  // duplicate end label
  CHECK_THROWS_AS(
      TreeSpace::build({"a", "b"}, {{"a", "b", Rational(0)}},
                       {{"e1", "a"}, {"e2", "a"}, {"e3", "b"}, {"e4", "b"}}),
      std::invalid_argument);  // zero length
}

TEST_CASE("tree file parser diagnostics") {
  auto expect_error_at = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      parse_tree(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_error_at("forest v1\n", 1);
  expect_error_at("tree v1\nVERTEX a\nEDGE a b 1/1\n", 3);        // unknown vertex at build
  expect_error_at("tree v1\nVERTEX a\nEDGE a a -1/1\n", 3);       // nonpositive length
  expect_error_at("tree v1\nVERTEX a\nVERTEX b\nEDGE a b 1/1\nEDGE a b 1/1\nEND e1 AT a\n"
                  "END e2 AT a\nEND e3 AT b\nEND e4 AT b\n",
                  9);  // cycle (parallel edge) detected at build, reported at EOF
  expect_error_at("tree v1\nVERTEX a\nVERTEX b\nEND e1 AT a\nEND e2 AT a\nEND e3 AT a\n"
                  "END e4 AT a\n",
                  7);  // disconnected / degree-1 vertex b

  std::istringstream ok("tree v1\nVERTEX c\nEND e1 AT c\nEND e2 AT c\nEND e3 AT c\n"
                        "END e4 AT c\n");
  CHECK(parse_tree(ok).end_count() == 4);
}

TEST_CASE("tree distances") {
  const TreeSpace s = spider();
  const TreePoint p{s.ray_segment(0), Rational(1, 2)};
  const TreePoint q{s.ray_segment(1), Rational(1, 3)};
  CHECK(tree_distance(s, p, p) == 0);
  CHECK(tree_distance(s, p, q) == Rational(5, 6));
  CHECK(tree_distance(s, q, p) == Rational(5, 6));

  const TreeSpace h = htree(Rational(2));
  CHECK(tree_distance(h, vertex_point(h, h.vertex_index("u")),
                      vertex_point(h, h.vertex_index("v"))) == 2);

  // same point through different segment addresses
  CHECK(same_point(s, TreePoint{0, Rational(0)}, TreePoint{2, Rational(0)}));
}

TEST_CASE("Gromov products match the arc-prefix oracle") {
  const TreeSpace s = spider();
  const TreePoint c = vertex_point(s, 0);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) CHECK(gromov_product(s, c, i, j) == 0);

  const TreePoint x{s.ray_segment(0), Rational(1, 2)};
  CHECK(gromov_product(s, x, 1, 2) == Rational(1, 2));

  const TreeSpace h = htree(Rational(3, 2));
  CHECK(gromov_product(h, vertex_point(h, h.vertex_index("u")), h.end_index("c"),
                       h.end_index("d")) == Rational(3, 2));

  CHECK_THROWS_AS(gromov_product(s, c, 1, 1), std::domain_error);

  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const TreeSpace t = random_tree(rng);
    const TreePoint x2 = random_tree_point(t, rng);
    for (int i = 0; i < t.end_count(); ++i)
      for (int j = i + 1; j < t.end_count(); ++j)
        CHECK(gromov_product(t, x2, i, j) == gromov_oracle(t, x2, i, j));
  }
}

TEST_CASE("visual metrics") {
  const TreeSpace s = spider();
  const LogMetric rc = visual_log_metric(s, vertex_point(s, 0));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) CHECK(rc.log_dist(i, j) == 0);

  const TreeSpace h = htree(Rational(1));
  const LogMetric ru = visual_log_metric(h, vertex_point(h, h.vertex_index("u")));
  CHECK(ru.log_dist(h.end_index("c"), h.end_index("d")) == Rational(-1));
  CHECK(ru.log_dist(h.end_index("a"), h.end_index("b")) == 0);
  CHECK(ru.log_dist(h.end_index("a"), h.end_index("c")) == 0);

  // antipodality on random trees
  Rng rng(9);
  for (int k = 0; k < 10; ++k) {
    const TreeSpace t = random_tree(rng);
    const LogMetric r = visual_log_metric(t, random_tree_point(t, rng));
    for (int i = 0; i < t.end_count(); ++i) {
      bool antipode = false;
      for (int j = 0; j < t.end_count(); ++j)
        antipode |= (j != i && r.log_dist(i, j) == 0);
      CHECK(antipode);
    }
  }
}

TEST_CASE("Busemann increments") {
  const TreeSpace s = spider();
  const TreePoint c = vertex_point(s, 0);
  const Rational t(1, 2);
  const TreePoint y{s.ray_segment(0), t};

  CHECK(busemann_log(s, 0, c, y) == t);    // y on the ray toward e1
  CHECK(busemann_log(s, 0, y, c) == -t);   // reversed roles
  CHECK(busemann_log(s, 1, c, y) == -t);   // seen from another end

  Rng rng(13);
  for (int k = 0; k < 15; ++k) {
    const TreeSpace tr = random_tree(rng);
    const TreePoint a = random_tree_point(tr, rng), b = random_tree_point(tr, rng);
    const Rational d = tree_distance(tr, a, b);
    for (int e = 0; e < tr.end_count(); ++e)
      CHECK(abs(busemann_log(tr, e, a, b)) <= d);
  }
}

TEST_CASE("projection recovers the basepoint of a visual metric") {
  const TreeSpace s = spider();
  const TreePoint x{s.ray_segment(2), Rational(7, 3)};
  auto pr = project_metric_tree(s, visual_log_metric(s, x));
  CHECK(pr.gap == 0);
  CHECK(same_point(s, pr.point, x));

  // bar metric: e^{-s} across {a,b}, e^{-(L-s)} across {c,d}, one otherwise
  const Rational L(1), sdist(1, 3);
  const TreeSpace h = htree(L);
  const FiniteBoundary bnd = h.boundary();
  std::vector<Rational> upper;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto &li = bnd.labels[i], &lj = bnd.labels[j];
      if (li == "a" && lj == "b") upper.push_back(-sdist);
      else if (li == "c" && lj == "d") upper.push_back(-(L - sdist));
      else upper.push_back(Rational(0));
    }
  auto pr2 = project_metric_tree(h, LogMetric(bnd, upper));
  CHECK(pr2.gap == 0);
  CHECK(!h.segment_is_ray(pr2.point.segment));
  CHECK(pr2.point.offset == sdist);

  // spider conformal-scale member lands on leg 1
  const LogMetric rc = visual_log_metric(s, vertex_point(s, 0));
  const Rational tt(1, 2);
  auto pr3 = project_metric_tree(s, conformal_scale(rc, {tt, -tt, -tt, -tt}));
  CHECK(pr3.gap == 0);
  CHECK(same_point(s, pr3.point, TreePoint{s.ray_segment(0), tt}));

  CHECK_THROWS_AS(
      project_metric_tree(s, conformal_scale(rc, std::vector<Rational>(4, Rational(1)))),
      MembershipRejected);
}

TEST_CASE("surjectivity on random members") {
  Rng rng(21);
  for (int k = 0; k < 25; ++k) {
    const TreeSpace t = random_tree(rng);
    TreePoint target;
    const LogMetric rho = random_member(t, rng, &target);
    auto pr = project_metric_tree(t, rho);
    CHECK(pr.gap == 0);
    CHECK(same_point(t, pr.point, target));
  }
}

TEST_CASE("Moebius extension between trees") {
  SECTION("identity bijection extends to the identity") {
    const TreeSpace s = spider();
    auto f = EndBijection::from_labels(
        s, s, {{"e1", "e1"}, {"e2", "e2"}, {"e3", "e3"}, {"e4", "e4"}});
    auto ext = tree_moebius_extend(s, s, f);
    REQUIRE(std::holds_alternative<TreeIsometry>(ext));
    const auto& iso = std::get<TreeIsometry>(ext);
    const TreePoint x{s.ray_segment(1), Rational(5, 4)};
    CHECK(same_point(s, iso.map(x), x));
  }

  SECTION("leg swap maps leg 1 onto leg 2 and fixes the center") {
    const TreeSpace s = spider();
    auto f = EndBijection::from_labels(
        s, s, {{"e1", "e2"}, {"e2", "e1"}, {"e3", "e3"}, {"e4", "e4"}});
    auto ext = tree_moebius_extend(s, s, f);
    REQUIRE(std::holds_alternative<TreeIsometry>(ext));
    const auto& iso = std::get<TreeIsometry>(ext);
    CHECK(same_point(s, iso.map(vertex_point(s, 0)), vertex_point(s, 0)));
    const TreePoint x{s.ray_segment(0), Rational(2, 3)};
    CHECK(same_point(s, iso.map(x), TreePoint{s.ray_segment(1), Rational(2, 3)}));
    CHECK(iso.preserves(x, vertex_point(s, 0)));
  }

  SECTION("different bar lengths: witness quadruple") {
    const TreeSpace h1 = htree(Rational(1)), h2 = htree(Rational(2));
    auto f = EndBijection::from_labels(h1, h2,
                                       {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}});
    auto ext = tree_moebius_extend(h1, h2, f);
    REQUIRE(std::holds_alternative<CrossRatioWitness>(ext));
    const auto& w = std::get<CrossRatioWitness>(ext);
    CHECK(abs(w.source - w.image) == Rational(1));  // logs differ by the bar difference
  }

  SECTION("relabeled copies extend exactly, with matching boundary rays") {
    Rng rng(31);
    for (int k = 0; k < 8; ++k) {
      const TreeSpace t = random_tree(rng);
      auto [copy, f] = shuffled_copy(t, rng);
      auto ext = tree_moebius_extend(t, copy, f);
      REQUIRE(std::holds_alternative<TreeIsometry>(ext));
      const auto& iso = std::get<TreeIsometry>(ext);
      for (int j = 0; j < 5; ++j)
        CHECK(iso.preserves(random_tree_point(t, rng), random_tree_point(t, rng)));
      const int e = rng.range(0, t.end_count() - 1);
      const TreePoint deep{t.ray_segment(e), t.core_size() + 4};
      CHECK(iso.map(deep).segment == copy.ray_segment(f.to[e]));
    }
  }
}

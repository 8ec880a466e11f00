#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "extension.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "schwarzian.hpp"
#include "suite_util.hpp"

namespace catb {

struct SuiteOptions {
  std::uint64_t seed = 42;
  int cases = 200;
  unsigned precision_bits = 128;
  int horizon = 50;   // orbit horizon N
  int samples = 0;    // 0: per-suite default
};

// ---------------------------------------------------------------------------
// Exact identities of the metric-class machinery, exercised on random trees.

inline SuiteReport run_core_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "core";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck chain("chain rule and antisymmetry (exact)");
  PropertyCheck gmvt("geometric mean value identity (exact)");
  PropertyCheck maxmin("max+min of the derivative log is 0 (exact)");
  PropertyCheck axioms("class distance metric axioms (exact)");
  PropertyCheck embed("sup-norm embedding is isometric (exact)");
  PropertyCheck scale("conformal scale inverts the embedding (exact)");
  PropertyCheck member("membership verdicts");
  PropertyCheck crossratio("cross-ratio invariance across the class (exact)");
  PropertyCheck lipschitz("derivative is 2*lambda^2-Lipschitz (certified)");

  for (int c = 0; c < opt.cases; ++c) {
    const TreeSpace t = random_tree(rng);
    TreePoint p1 = random_tree_point(t, rng);
    TreePoint p2 = random_tree_point(t, rng);
    TreePoint p3 = random_tree_point(t, rng);
    const std::string repro = describe_tree_case(t, {p1, p2, p3});
    const LogMetric r1 = visual_log_metric(t, p1);
    const LogMetric r2 = visual_log_metric(t, p2);
    const LogMetric r3 = visual_log_metric(t, p3);
    const int n = t.end_count();

    std::vector<Rational> d21(n), d32(n), d31(n);
    for (int i = 0; i < n; ++i) {
      d21[i] = derivative_log(r2, r1, i);
      d32[i] = derivative_log(r3, r2, i);
      d31[i] = derivative_log(r3, r1, i);
      chain.expect(d31[i] == d32[i] + d21[i], repro);
      chain.expect(derivative_log(r1, r2, i) == -d21[i], repro);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        gmvt.expect(2 * r2.log_dist(i, j) == 2 * r1.log_dist(i, j) + d21[i] + d21[j], repro);

    Rational dmax = d21[0], dmin = d21[0];
    for (int i = 1; i < n; ++i) {
      dmax = std::max(dmax, d21[i]);
      dmin = std::min(dmin, d21[i]);
    }
    maxmin.expect(dmax + dmin == 0, repro);

    const Rational d12 = class_distance(r1, r2);
    const Rational d23 = class_distance(r2, r3);
    const Rational d13 = class_distance(r1, r3);
    axioms.expect(d12 >= 0 && d23 >= 0 && d13 >= 0, repro);
    axioms.expect(class_distance(r1, r1) == 0, repro);
    axioms.expect(d12 == class_distance(r2, r1), repro);
    axioms.expect(d13 <= d12 + d23, repro);
    axioms.expect((d12 == 0) == same_point(t, p1, p2), repro);

    const std::vector<Rational> e2 = embed_coordinates(r2, r1);
    const std::vector<Rational> e3 = embed_coordinates(r3, r1);
    Rational sup(0);
    for (int i = 0; i < n; ++i) sup = std::max(sup, abs(e3[i] - e2[i]));
    embed.expect(sup == class_distance(r2, r3), repro);

    TreePoint target;
    const LogMetric built = random_member(t, rng, &target);
    const LogMetric base = visual_log_metric(t, tree_basepoint(t));
    std::vector<Rational> logf;
    for (int i = 0; i < n; ++i) logf.push_back(busemann_log(t, i, tree_basepoint(t), target));
    scale.expect(embed_coordinates(built, base) == logf, repro);
    scale.expect(class_distance(base, built) == tree_distance(t, tree_basepoint(t), target),
                 repro);

    member.expect(static_cast<bool>(validate_membership(r1, r1, opt.precision_bits)), repro);
    member.expect(static_cast<bool>(validate_membership(built, base, opt.precision_bits)),
                  repro);
    // uniform shrink: every distance scaled by e^{-1/2}, diameter one fails
    const LogMetric shrunk =
        conformal_scale(r1, std::vector<Rational>(n, Rational(-1, 2)));
    member.expect(!validate_membership(shrunk, r1, opt.precision_bits), repro);
    const LogMetric blown = conformal_scale(r1, std::vector<Rational>(n, Rational(1)));
    member.expect(!validate_membership(blown, r1, opt.precision_bits), repro);

    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int cc = b + 1; cc < n; ++cc)
          for (int d = cc + 1; d < n; ++d) {
            const Rational v = cross_ratio_log(r1, a, b, cc, d);
            crossratio.expect(v == cross_ratio_log(r2, a, b, cc, d) &&
                                  v == cross_ratio_log(r3, a, b, cc, d),
                              repro);
            crossratio.expect(cross_ratio_log(r1, a, b, d, cc) == -v, repro);
          }

    // |f(x) - f(y)| <= 2 lambda^2 rho1(x, y) for f = exp of the derivative log
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Rational bound_exp = 2 * dmax + r1.log_dist(i, j);
        unsigned bits = opt.precision_bits;
        Cert cert = certify_exp_diff_le(d21[i], d21[j], 2, bound_exp, bits);
        while (cert == Cert::undecided && bits < 4096) {
          bits *= 2;
          cert = certify_exp_diff_le(d21[i], d21[j], 2, bound_exp, bits);
        }
        lipschitz.expect(cert == Cert::holds, repro);
      }
  }

  for (auto* p : {&chain, &gmvt, &maxmin, &axioms, &embed, &scale, &member, &crossratio,
                  &lipschitz})
    rep.properties.push_back(p->take());
  return rep;
}

// ---------------------------------------------------------------------------
// Tree model: embedding isometry, projection surjectivity, Busemann bounds,
// and isometric extension of cross-ratio-preserving end bijections.

inline SuiteReport run_tree_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "tree";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck isom("visual embedding is isometric (exact)");
  PropertyCheck antipodal("visual metrics are antipodal members");
  PropertyCheck busemann("Busemann bound and collinear equality (exact)");
  PropertyCheck surject("projection of members has gap exactly 0");
  PropertyCheck reject("projection rejects non-members");
  PropertyCheck extend("end bijections extend to exact isometries");
  PropertyCheck boundary("extension has the prescribed boundary values");
  PropertyCheck witness("cross-ratio mismatch yields a witness");

  const int tree_cases = std::max(4, opt.cases / 10);
  for (int c = 0; c < tree_cases; ++c) {
    const TreeSpace t = random_tree(rng);
    const TreePoint x = random_tree_point(t, rng);
    const TreePoint y = random_tree_point(t, rng);
    const std::string repro = describe_tree_case(t, {x, y});
    const LogMetric rx = visual_log_metric(t, x);
    const LogMetric ry = visual_log_metric(t, y);

    isom.expect(class_distance(rx, ry) == tree_distance(t, x, y), repro);
    antipodal.expect(static_cast<bool>(validate_membership(ry, rx, opt.precision_bits)),
                     repro);

    const Rational d = tree_distance(t, x, y);
    for (int e = 0; e < t.end_count(); ++e) {
      const Rational b = busemann_log(t, e, x, y);
      busemann.expect(abs(b) <= d, repro);
    }
    // y on [x, end): walk from x toward an end far enough to pass the core
    {
      const int e = rng.range(0, t.end_count() - 1);
      const TreePoint far = far_ray_point(t, e, x);
      busemann.expect(busemann_log(t, e, x, far) == tree_distance(t, x, far), repro);
      busemann.expect(busemann_log(t, e, far, x) == -tree_distance(t, x, far), repro);
    }

    for (int k = 0; k < 3; ++k) {
      TreePoint target;
      const LogMetric member = random_member(t, rng, &target);
      TreeProjection pr = project_metric_tree(t, member, opt.precision_bits);
      surject.expect(pr.gap == 0, repro);
      surject.expect(same_point(t, pr.point, target), repro);
    }

    try {
      const LogMetric bad =
          conformal_scale(rx, std::vector<Rational>(t.end_count(), Rational(1)));
      project_metric_tree(t, bad, opt.precision_bits);
      reject.expect(false, repro);
    } catch (const MembershipRejected&) {
      reject.expect(true);
    }

    // isometric relabeled copy
    auto [copy, f] = shuffled_copy(t, rng);
    auto ext = tree_moebius_extend(t, copy, f, opt.precision_bits);
    if (!std::holds_alternative<TreeIsometry>(ext)) {
      extend.expect(false, repro);
      continue;
    }
    const TreeIsometry& iso = std::get<TreeIsometry>(ext);
    for (int k = 0; k < 6; ++k) {
      TreePoint a = random_tree_point(t, rng), b = random_tree_point(t, rng);
      extend.expect(iso.preserves(a, b), repro);
    }
    {
      // far points on a ray land on the image ray with growing offsets
      const int e = rng.range(0, t.end_count() - 1);
      const Rational big = t.core_size() + 5;
      const TreePoint a{t.ray_segment(e), big};
      const TreePoint fa = iso.map(a);
      const TreePoint fb = iso.map(TreePoint{t.ray_segment(e), big + 2});
      boundary.expect(fa.segment == copy.ray_segment(f.to[e]), repro);
      boundary.expect(fb.segment == copy.ray_segment(f.to[e]) && fb.offset == fa.offset + 2,
                      repro);
    }
  }

  {
    // two H-trees with different bar lengths: the natural pairing distorts a
    // cross-ratio and must be rejected with a witness
    const TreeSpace h1 = TreeSpace::build(
        {"u", "v"}, {{"u", "v", Rational(1)}},
        {{"a", "u"}, {"b", "u"}, {"c", "v"}, {"d", "v"}});
    const TreeSpace h2 = TreeSpace::build(
        {"u", "v"}, {{"u", "v", Rational(2)}},
        {{"a", "u"}, {"b", "u"}, {"c", "v"}, {"d", "v"}});
    auto f = EndBijection::from_labels(h1, h2,
                                       {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}});
    auto ext = tree_moebius_extend(h1, h2, f, opt.precision_bits);
    witness.expect(std::holds_alternative<CrossRatioWitness>(ext));
    if (auto* w = std::get_if<CrossRatioWitness>(&ext))
      witness.expect(w->source != w->image);
  }

  for (auto* p :
       {&isom, &antipodal, &busemann, &surject, &reject, &extend, &boundary, &witness})
    rep.properties.push_back(p->take());
  return rep;
}

// ---------------------------------------------------------------------------
// Disk model: Poisson closed forms against radial limits, angles, geodesics,
// Moebius action.

inline SuiteReport run_disk_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "disk";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck radial("Busemann closed form matches the radial limit");
  PropertyCheck bound("Busemann bound and radial equality");
  PropertyCheck gromov("visual metric matches the Gromov product limit");
  PropertyCheck gmvt("visual metrics satisfy the mean value identity");
  PropertyCheck angle("angle formula agrees with the Poisson derivative");
  PropertyCheck isom("embedding is isometric for the sup over the circle");
  PropertyCheck firstorder("first-order expansion of the Busemann cocycle");
  PropertyCheck moebius("Moebius maps act by isometries and preserve cross-ratios");
  PropertyCheck geodesic("geodesics are unit speed with consistent flip");
  PropertyCheck trace("trace classification of the oracle matrices");

  for (int c = 0; c < opt.cases; ++c) {
    const DiskPoint x = random_disk_point(rng, 0.85);
    const DiskPoint y = random_disk_point(rng, 0.85);
    const CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
    CirclePoint eta = circle_point(rng.uniform(0.0, kTwoPi));
    while (chordal(xi, eta) < 1e-2) eta = circle_point(rng.uniform(0.0, kTwoPi));

    const double b = busemann(xi, x, y);
    {
      double prev_err = 1e300;
      for (int k = 6; k <= 10; ++k) {
        const DiskPoint a = disk_point((1.0 - std::pow(10.0, -k)) * xi.u);
        const double approx = disk_distance(x, a) - disk_distance(y, a);
        const double err = std::abs(approx - b);
        if (k == 8) radial.bound(err, 1e-6);
        if (k > 6) radial.expect(err <= prev_err + 1e-9);
        prev_err = err;
      }
    }
    bound.expect(std::abs(b) <= disk_distance(x, y) + 1e-12);
    {
      const Geodesic ray = Geodesic::ray_from(x, xi);
      const DiskPoint z = ray.point_at(rng.uniform(0.5, 4.0));
      bound.bound(std::abs(busemann(xi, x, z) - disk_distance(x, z)), 1e-9);
    }

    {
      const double eps = 1e-8;
      const DiskPoint a = disk_point((1.0 - eps) * xi.u);
      const DiskPoint ap = disk_point((1.0 - eps) * eta.u);
      const double product =
          0.5 * (disk_distance(x, a) + disk_distance(x, ap) - disk_distance(a, ap));
      gromov.bound(std::abs(std::exp(-product) - visual_metric(x, xi, eta)), 1e-6);
    }

    gmvt.bound(std::abs(visual_log(y, xi, eta) - visual_log(x, xi, eta) -
                        0.5 * (busemann(xi, x, y) + busemann(eta, x, y))),
               1e-9);

    angle.bound(std::abs(derivative_from_angle(x, y, xi) - std::exp(busemann(xi, x, y))),
                1e-9);

    if (c < std::max(10, opt.cases / 4)) {
      const DiskPoint far = random_disk_point_at(rng, rng.uniform(0.2, 8.0));
      isom.bound(std::abs(visual_class_distance(disk_origin(), far) -
                          disk_distance(disk_origin(), far)),
                 1e-6);
    }

    {
      const double t = 1e-3;
      const double psi = rng.uniform(0.0, kTwoPi);
      const double th = std::tanh(0.5 * t);
      const DiskPoint y1 = MoebiusDisk::to_origin(x).inverse().apply(
          DiskPoint{th * std::polar(1.0, psi), (1.0 - th) * (1.0 + th)});
      double worst = 0.0;
      for (int k = 0; k < 64; ++k) {
        const CirclePoint z = circle_point(kTwoPi * k / 64);
        worst = std::max(worst, std::abs(busemann(z, x, y1) -
                                         t * std::cos(angle_at(x, y1, z))));
      }
      firstorder.bound(worst, 1e-5);
    }

    {
      const MoebiusDisk m = random_moebius(rng);
      moebius.bound(std::abs(disk_distance(m.apply(x), m.apply(y)) - disk_distance(x, y)),
                    1e-9);
      std::array<CirclePoint, 4> q;
      do {
        for (auto& a : q) a = circle_point(rng.uniform(0.0, kTwoPi));
      } while (quad_min_separation(q) < 0.05);
      const double before = visual_log(disk_origin(), q[0], q[2]) +
                            visual_log(disk_origin(), q[1], q[3]) -
                            visual_log(disk_origin(), q[0], q[3]) -
                            visual_log(disk_origin(), q[1], q[2]);
      const std::array<CirclePoint, 4> im{m.apply(q[0]), m.apply(q[1]), m.apply(q[2]),
                                          m.apply(q[3])};
      const double after = visual_log(disk_origin(), im[0], im[2]) +
                           visual_log(disk_origin(), im[1], im[3]) -
                           visual_log(disk_origin(), im[0], im[3]) -
                           visual_log(disk_origin(), im[1], im[2]);
      moebius.bound(std::abs(after - before), 1e-10);
    }

    {
      const Geodesic g = Geodesic::through(xi, eta).flowed(rng.uniform(-2.0, 2.0));
      const double s = rng.uniform(-3.0, 3.0), u = rng.uniform(-3.0, 3.0);
      geodesic.bound(
          std::abs(disk_distance(g.point_at(s), g.point_at(u)) - std::abs(s - u)), 1e-9);
      geodesic.bound(disk_distance(g.flipped().point_at(-s), g.point_at(s)), 1e-9);
      geodesic.bound(disk_distance(Geodesic::through(xi, eta, g.point_at(0.0)).point_at(0.0),
                                   g.point_at(0.0)),
                     1e-9);
    }
  }

  trace.expect(classify_by_trace(HalfPlaneMatrix::normalized(
                   std::cos(0.628), -std::sin(0.628), std::sin(0.628), std::cos(0.628))) ==
               MapClass::elliptic);
  trace.expect(classify_by_trace(HalfPlaneMatrix::normalized(1, 1, 0, 1)) ==
               MapClass::parabolic);
  trace.expect(classify_by_trace(HalfPlaneMatrix::normalized(std::exp(0.5), 0, 0,
                                                             std::exp(-0.5))) ==
               MapClass::hyperbolic);

  for (auto* p : {&radial, &bound, &gromov, &gmvt, &angle, &isom, &firstorder, &moebius,
                  &geodesic, &trace})
    rep.properties.push_back(p->take());
  return rep;
}

// ---------------------------------------------------------------------------
// Integrated Schwarzian: vanishing on Moebius maps, distortion identity,
// cocycle, conjugacy bookkeeping, limits.

inline SuiteReport run_schwarzian_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "schwarzian";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck sym("Schwarzian symmetric and basepoint-independent");
  PropertyCheck vanish("Schwarzian of Moebius maps vanishes");
  PropertyCheck distortion("cross-ratio distortion identity");
  PropertyCheck cocycle("cocycle identity under composition");
  PropertyCheck flow("conjugacy commutes with the flows");
  PropertyCheck flip("flip deviation within tolerance");
  PropertyCheck profile("distance differences converge to the Schwarzian");
  PropertyCheck decay("forward asymptotic pairs contract");
  PropertyCheck backward("backward term stabilizes at the derived level");
  PropertyCheck sandwich("mean value sandwich with the sampled sup");
  PropertyCheck confext("conformal extension within the additive bound");

  const std::vector<CircleMap> diffeos{
      sinusoidal_map({{1, 0.2, 0.0}}),
      sinusoidal_map({{1, 0.15, 1.1}, {2, 0.05, 0.4}}),
      sinusoidal_map({{2, 0.1, 2.2}, {3, 0.04, 5.1}}),
  };
  const int quads = std::max(10, opt.cases / 2);

  for (const auto& f : diffeos) {
    const double s_sup = schwarzian_sup(f, 64);
    for (int c = 0; c < quads; ++c) {
      const auto q = random_separated_quad(rng, 0.15);
      const double s1 = integrated_schwarzian(f, q[0], q[2]).value;
      const double s2 = integrated_schwarzian(f, q[2], q[0]).value;
      sym.bound(std::abs(s1 - s2), 1e-12);
      distortion.bound(distortion_residual(f, q), 1e-6);
      sandwich_case(sandwich, f, rng, s_sup);
    }
    for (int c = 0; c < std::max(5, opt.cases / 10); ++c) {
      const Geodesic g = random_geodesic(rng);
      const double t = rng.uniform(-2.0, 2.0);
      flow.bound(disk_distance(conjugate_geodesic(f, g.flowed(t)).point_at(0.0),
                               conjugate_geodesic(f, g).flowed(t).point_at(0.0)),
                 1e-8);
      flip.bound(flip_deviation(f, g), 1e-6);
    }
  }

  for (int c = 0; c < std::max(5, opt.cases / 10); ++c) {
    const MoebiusDisk m = random_moebius(rng);
    const CircleMap fm = moebius_boundary_map(m);
    vanish.bound(schwarzian_sup(fm, 64), 1e-9);
    const auto q = random_separated_quad(rng, 0.15);
    distortion.bound(distortion_residual(fm, q), 1e-9);
    flip.bound(flip_deviation(fm, random_geodesic(rng)), 1e-9);
  }

  {
    const CircleMap f = diffeos[0];
    const CircleMap g = sinusoidal_map({{2, 0.1, 0.3}});
    const CircleMap fi = inverse_map(f);
    for (int c = 0; c < std::max(10, opt.cases / 4); ++c) {
      CirclePoint a = circle_point(rng.uniform(0.0, kTwoPi));
      CirclePoint b = circle_point(rng.uniform(0.0, kTwoPi));
      if (chordal(a, b) < 0.1) continue;
      cocycle.bound(cocycle_residual(f, g, a, b), 1e-7);
      cocycle.bound(cocycle_residual(f, fi, a, b), 1e-7);
      const MoebiusDisk m = random_moebius(rng);
      cocycle.bound(cocycle_residual(moebius_boundary_map(m),
                                     moebius_boundary_map(m.inverse()), a, b),
                    1e-9);
    }

    for (int c = 0; c < 8; ++c) {
      CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
      CirclePoint eta = circle_point(rng.uniform(0.0, kTwoPi));
      if (chordal(xi, eta) < 0.3) {
        --c;
        continue;
      }
      const DiskPoint x = random_disk_point(rng, 0.5);
      const double s = integrated_schwarzian(f, xi, eta).value;
      const auto prof = distance_diff_profile(f, x, xi, eta, {5.0, 10.0, 15.0});
      profile.bound(std::abs(prof.back() - s), 1e-4);
    }

    {
      const Geodesic g0 = random_geodesic(rng);
      const CirclePoint xi0 =
          circle_point(g0.backward().theta + 0.9);  // distinct from both endpoints
      std::vector<std::pair<double, double>> schedule;
      for (double t = 4.0; t <= 12.0; t += 2.0)
        schedule.push_back({t, 1e-4 * std::exp(-1.5 * t)});
      const auto dists = forward_asymptotic_pairs(f, g0, xi0, schedule);
      for (std::size_t i = 0; i + 1 < dists.forward.size(); ++i)
        decay.expect(dists.forward[i + 1] <= std::max(dists.forward[i], 1e-6));
      decay.bound(dists.forward.back(), 1e-3);
      // unperturbed pairs coincide
      const auto zero = forward_asymptotic_pairs(f, g0, g0.backward(), {{6.0, 0.0}});
      decay.bound(zero.forward[0], 1e-9);
      // identity map: the distance is the perturbation scale itself
      const auto idp = forward_asymptotic_pairs(identity_map(), g0, xi0, schedule);
      decay.bound(idp.forward.back(), 1e-3);

      // backward term stabilizes at |S(xi,eta) - S(xi0,eta)|
      const double level =
          std::abs(integrated_schwarzian(f, g0.backward(), g0.forward()).value -
                   integrated_schwarzian(f, xi0, g0.forward()).value);
      std::vector<std::pair<double, double>> tail;
      for (double t = 8.0; t <= 14.0; t += 2.0)
        tail.push_back({t, 1e-4 * std::exp(-1.5 * t)});
      const auto stab = forward_asymptotic_pairs(f, g0, xi0, tail);
      backward.bound(std::abs(stab.backward.back() - level), 2e-3);
    }
  }

  {
    // conformal extension: Moebius input reproduces the isometry, the test
    // diffeo stays within the additive bound
    const MoebiusDisk m = random_moebius(rng);
    ConformalExtension cm(moebius_boundary_map(m));
    for (int c = 0; c < 4; ++c) {
      const DiskPoint x = random_disk_point(rng, 0.8);
      confext.bound(disk_distance(cm.map(x).point, m.apply(x)), 1e-4);
    }
    ConformalExtension ci(identity_map());
    const DiskPoint xid = random_disk_point(rng, 0.8);
    confext.bound(disk_distance(ci.map(xid).point, xid), 1e-4);

    ConformalExtension ce(diffeos[0]);
    const double bound = std::log(2.0) + 12.0 * ce.schwarzian_bound() + 1e-3;
    std::vector<DiskPoint> pts;
    std::vector<DiskPoint> images;
    for (int k = 0; k < 8; ++k) {
      pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
      images.push_back(ce.map(pts.back()).point);
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        confext.bound(std::abs(disk_distance(images[i], images[j]) -
                               disk_distance(pts[i], pts[j])),
                      bound);
  }

  for (auto* p : {&sym, &vanish, &distortion, &cocycle, &flow, &flip, &profile, &decay,
                  &backward, &sandwich, &confext})
    rep.properties.push_back(p->take());
  return rep;
}

// ---------------------------------------------------------------------------
// Extension machinery across both models.

inline SuiteReport run_extension_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "extension";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck embed("embedding isometric (exact on trees, 1e-6 on the disk)");
  PropertyCheck push("push-forward is an isometry of the class distance");
  PropertyCheck pushreject("push-forward rejects non-Moebius maps");
  PropertyCheck proj("projection returns embedded points");
  PropertyCheck density("projection gap within the density bound");
  PropertyCheck qi("Moebius extension within the additive bound");
  PropertyCheck imagedense("extension image is dense within the bound");
  PropertyCheck coherence("extension boundary values match the boundary map");

  {
    const TreeSpace t = random_tree(rng);
    const TreePoint a = random_tree_point(t, rng), b = random_tree_point(t, rng);
    embed.expect(class_distance(visual_log_metric(t, a), visual_log_metric(t, b)) ==
                 tree_distance(t, a, b));
    auto [copy, f] = shuffled_copy(t, rng);
    const LogMetric pa = pushforward_log_metric(f, visual_log_metric(t, a), copy.boundary());
    const LogMetric pb = pushforward_log_metric(f, visual_log_metric(t, b), copy.boundary());
    push.expect(class_distance(pa, pb) ==
                class_distance(visual_log_metric(t, a), visual_log_metric(t, b)));
    TreeProjection pr = project_metric_tree(t, visual_log_metric(t, a), opt.precision_bits);
    proj.expect(pr.gap == 0 && same_point(t, pr.point, a));
  }

  const int disk_cases = std::max(4, opt.cases / 40);
  for (int c = 0; c < disk_cases; ++c) {
    const DiskPoint x = random_disk_point_at(rng, rng.uniform(0.1, 5.0));
    const DiskPoint y = random_disk_point_at(rng, rng.uniform(0.1, 5.0));
    embed.bound(std::abs(class_distance(embed_disk_point(x), embed_disk_point(y)) -
                         disk_distance(x, y)),
                1e-6);
    const MoebiusDisk m = random_moebius(rng);
    const CircleMap fm = moebius_boundary_map(m);
    const CircleMap fmi = moebius_boundary_map(m.inverse());
    const DiskMetric p1 = pushforward_disk(fm, fmi, embed_disk_point(x));
    const DiskMetric p2 = pushforward_disk(fm, fmi, embed_disk_point(y));
    push.bound(std::abs(class_distance(p1, p2) - disk_distance(x, y)), 1e-8);

    DiskProjection dp = project_disk_metric(embed_disk_point(x));
    proj.bound(disk_distance(dp.point, x), 1e-6);
    proj.bound(std::abs(dp.gap), 1e-6);
  }

  try {
    pushforward_disk(sinusoidal_map({{1, 0.2, 0.0}}),
                     inverse_map(sinusoidal_map({{1, 0.2, 0.0}})),
                     embed_disk_point(disk_origin()));
    pushreject.expect(false);
  } catch (const NotMoebiusError&) {
    pushreject.expect(true);
  }

  {
    const TreeSpace t = random_tree(rng);
    for (int k = 0; k < 5; ++k) {
      const LogMetric member = random_member(t, rng);
      density.expect(project_metric_tree(t, member, opt.precision_bits).gap == 0);
    }
  }
  const int samples = opt.samples > 0 ? opt.samples : 3;
  int draws = 0;
  for (int k = 0; k < samples; ++k) {
    auto smp = sample_disk_metric(rng);
    if (!smp) {
      density.expect(false, "sampler exhausted its attempts");
      continue;
    }
    draws += smp->attempts;
    DiskProjection dp = project_disk_metric(smp->metric);
    density.expect(dp.converged);
    density.bound(dp.gap, 0.5 * std::log(2.0) + 1e-3);
  }
  density.note(std::to_string(samples) + " disk samples from " + std::to_string(draws) +
               " draws (" + std::to_string(draws - samples) + " rejected)");

  {
    // disk-to-disk Moebius extension
    const MoebiusDisk m = random_moebius(rng);
    const auto ext = MoebiusDiskExtension::from_matrix(m);
    std::vector<DiskPoint> pts, images;
    for (int k = 0; k < 8; ++k) {
      pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
      images.push_back(ext.map(pts.back()));
      qi.bound(disk_distance(images.back(), m.apply(pts.back())), 1e-4);
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        qi.bound(std::abs(disk_distance(images[i], images[j]) -
                          disk_distance(pts[i], pts[j])),
                 std::log(2.0) + 1e-3);

    const auto inv_ext = MoebiusDiskExtension::from_matrix(m.inverse());
    for (int k = 0; k < 4; ++k) {
      const DiskPoint probe = random_disk_point_at(rng, rng.uniform(0.0, 3.0));
      const DiskPoint x = inv_ext.map(probe);
      imagedense.bound(disk_distance(ext.map(x), probe), std::log(2.0) + 1e-3);
    }

    // boundary coherence along a ray
    const DiskPoint x0 = random_disk_point(rng, 0.3);
    const CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
    const CirclePoint fxi = moebius_boundary_map(m)(xi);
    const Geodesic ray = Geodesic::ray_from(x0, xi);
    const DiskPoint fx = ext.map(x0);
    double prev = 1e300;
    for (double off : {4.0, 8.0, 12.0}) {
      const DiskPoint fa = ext.map(ray.point_at(off), ray.point_at(off));
      const MoebiusDisk t = MoebiusDisk::to_origin(fx);
      const CirclePoint dir =
          t.inverse().apply(circle_point(std::arg(t.apply(fa).z)));
      const double vis = visual_metric(fx, dir, fxi);
      coherence.expect(vis <= prev + 1e-9);
      prev = vis;
      if (off == 12.0) coherence.bound(vis, 1e-3);
    }
  }

  for (auto* p :
       {&embed, &push, &pushreject, &proj, &density, &qi, &imagedense, &coherence})
    rep.properties.push_back(p->take());
  return rep;
}

// ---------------------------------------------------------------------------
// Dynamical classification against the trace oracle.

inline SuiteReport run_classify_suite(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = "classify";
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  Rng rng(opt.seed);

  PropertyCheck oracle("orbit classification agrees with the trace oracle");
  PropertyCheck parabolic("exact parabolic inputs classify as parabolic");
  PropertyCheck fixed("accumulation directions are fixed points");
  PropertyCheck converge("boundary orbits converge to the fixed points");
  PropertyCheck bilip("elliptic iterates are uniformly bi-Lipschitz");
  PropertyCheck tree("tree end permutations give bounded orbits");
  PropertyCheck defect("projected orbit matches the exact one");

  const int matrix_cases = opt.samples > 0 ? opt.samples : 300;
  const DiskPoint base = disk_origin();
  for (int c = 0; c < matrix_cases; ++c) {
    const HalfPlaneMatrix hm = random_halfplane_matrix(rng, 1e-3);
    const MapClass truth = classify_by_trace(hm);
    const MoebiusDisk m = hm.to_disk();
    const ClassificationRun run =
        classify_moebius_map(m, base, opt.horizon, 10.0, 0.05);
    const bool agree =
        (truth == MapClass::elliptic && run.result.kind == Classification::Kind::elliptic) ||
        (truth == MapClass::parabolic &&
         run.result.kind == Classification::Kind::parabolic) ||
        (truth == MapClass::hyperbolic &&
         run.result.kind == Classification::Kind::hyperbolic);
    std::ostringstream repro;
    repro << "matrix " << hm.a << ' ' << hm.b << ' ' << hm.c << ' ' << hm.d << " trace "
          << hm.trace() << " got " << to_string(run.result.kind) << " N " << run.N_used;
    oracle.expect(agree, repro.str());

    if (run.result.kind == Classification::Kind::hyperbolic ||
        run.result.kind == Classification::Kind::parabolic) {
      const CircleMap fm = moebius_boundary_map(m);
      const CirclePoint fwd = *run.result.fixed_forward;
      fixed.bound(chordal(fm(fwd), fwd), 1e-6, repro.str());
      if (run.result.kind == Classification::Kind::hyperbolic) {
        const CirclePoint bwd = *run.result.fixed_backward;
        fixed.bound(chordal(fm(bwd), bwd), 1e-6, repro.str());
        // sampled boundary orbits converge forward/backward; start well away
        // from both fixed points (near-parabolic necks are slow to traverse)
        CirclePoint probe = circle_point(0.5 * (fwd.theta + bwd.theta));
        if (std::min(chordal(probe, fwd), chordal(probe, bwd)) <
            std::min(chordal(circle_point(probe.theta + std::numbers::pi), fwd),
                     chordal(circle_point(probe.theta + std::numbers::pi), bwd)))
          probe = circle_point(probe.theta + std::numbers::pi);
        const int iters = std::max(400, 4 * run.N_used);
        CirclePoint cur = probe;
        for (int n = 0; n < iters; ++n) cur = fm(cur);
        converge.bound(chordal(cur, fwd), 1e-2, repro.str());
        const CircleMap fmi = moebius_boundary_map(m.inverse());
        cur = probe;
        for (int n = 0; n < iters; ++n) cur = fmi(cur);
        converge.bound(chordal(cur, bwd), 1e-2, repro.str());
      }
    }
    if (run.result.kind == Classification::Kind::elliptic && c % 10 == 0) {
      const OrbitRecord rec = moebius_orbit(m, base, opt.horizon);
      const CircleMap fm = moebius_boundary_map(m);
      const double allowance = 2.0 * rec_diameter(rec) + std::log(2.0);
      CirclePoint a = circle_point(0.4), b = circle_point(2.9);
      CirclePoint fa = a, fb = b;
      for (int n = 1; n <= opt.horizon; ++n) {
        fa = fm(fa);
        fb = fm(fb);
        bilip.bound(std::abs(visual_log(base, fa, fb) - visual_log(base, a, b)), allowance,
                    repro.str());
      }
    }
  }

  {
    // exact parabolic instances, both orientations and a conjugate
    for (const HalfPlaneMatrix hm :
         {HalfPlaneMatrix::normalized(1, 1, 0, 1), HalfPlaneMatrix::normalized(1, 0, 1, 1),
          HalfPlaneMatrix::normalized(2, 1, -1, 0)}) {
      const ClassificationRun run =
          classify_moebius_map(hm.to_disk(), base, opt.horizon, 10.0, 0.05);
      parabolic.expect(run.result.kind == Classification::Kind::parabolic,
                       "trace " + std::to_string(hm.trace()));
      if (run.result.fixed_forward) {
        const CircleMap fm = moebius_boundary_map(hm.to_disk());
        fixed.bound(chordal(fm(*run.result.fixed_forward), *run.result.fixed_forward), 1e-6);
        // boundary orbits approach the fixed point from both sides
        CirclePoint cur = circle_point(run.result.fixed_forward->theta + 2.0);
        double last = 2.0;
        for (int n = 0; n < 400; ++n) cur = fm(cur);
        converge.expect(chordal(cur, *run.result.fixed_forward) < last);
      }
    }
  }

  {
    const TreeSpace spider = TreeSpace::build(
        {"c"}, {}, {{"e1", "c"}, {"e2", "c"}, {"e3", "c"}, {"e4", "c"}});
    auto f = EndBijection::from_labels(
        spider, spider, {{"e1", "e2"}, {"e2", "e1"}, {"e3", "e3"}, {"e4", "e4"}});
    auto ext = tree_moebius_extend(spider, spider, f, opt.precision_bits);
    tree.expect(std::holds_alternative<TreeIsometry>(ext));
    if (auto* iso = std::get_if<TreeIsometry>(&ext)) {
      const TreePoint x{spider.ray_segment(0), Rational(3, 2)};
      tree.expect(tree_orbit_diameter(*iso, x, 8) <= Rational(3));
    }
  }

  {
    // the projection path reproduces the exact isometry orbit
    const MoebiusDisk m =
        HalfPlaneMatrix::normalized(std::exp(0.25), 0.1, 0.0, std::exp(-0.25)).to_disk();
    const auto ext = MoebiusDiskExtension::from_matrix(m);
    const OrbitRecord exact = moebius_orbit(m, base, 4);
    const OrbitRecord projected = extension_orbit(ext, base, 4);
    for (int n = 1; n <= 4; ++n) {
      defect.bound(disk_distance(exact.at(n), projected.at(n)), 1e-4);
      defect.bound(std::abs(disk_distance(projected.at(n), ext.map(projected.at(n - 1))) -
                            0.0),
                   2.0 * std::log(2.0) + 1e-3);
    }
  }

  for (auto* p : {&oracle, &parabolic, &fixed, &converge, &bilip, &tree, &defect})
    rep.properties.push_back(p->take());
  return rep;
}

inline SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport rep;
  if (name == "core") rep = run_core_suite(opt);
  else if (name == "tree") rep = run_tree_suite(opt);
  else if (name == "disk") rep = run_disk_suite(opt);
  else if (name == "schwarzian") rep = run_schwarzian_suite(opt);
  else if (name == "extension") rep = run_extension_suite(opt);
  else if (name == "classify") rep = run_classify_suite(opt);
  else throw std::invalid_argument("unknown suite '" + name + "'");
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rep;
}

inline std::vector<std::string> suite_names() {
  return {"core", "tree", "disk", "schwarzian", "extension", "classify"};
}

}  // namespace catb

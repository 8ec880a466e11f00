// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.

#include <catb/classifier.hpp>
#include <catb/extension.hpp>
#include <catb/suites.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace catb;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::optional<SuiteReport> core_report;

const SuiteReport& core200() {
  if (!core_report) {
    SuiteOptions opt;
    opt.seed = 42;
    opt.cases = 200;
    core_report = run_core_suite(opt);
  }
  return *core_report;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------- 1, 2

Outcome tree_exact_identities() {
  const SuiteReport& rep = core200();
  Outcome out;
  long cases = 0;
  for (const auto& p : rep.properties) {
    if (p.name.find("Lipschitz") != std::string::npos) continue;
    cases += p.cases;
    if (!p.pass) {
      out.pass = false;
      out.detail = "failed: " + p.name;
      return out;
    }
  }
  out.detail = std::to_string(cases) + " exact checks over 200 seeded tree cases";
  return out;
}

Outcome lipschitz_certified() {
  const SuiteReport& rep = core200();
  for (const auto& p : rep.properties)
    if (p.name.find("Lipschitz") != std::string::npos)
      return {p.pass, std::to_string(p.cases) + " certified pairs"};
  return {false, "property missing"};
}

// ------------------------------------------------------------------------- 3

Outcome tree_surjectivity() {
  Rng rng(101);
  int checked = 0;
  for (int t = 0; t < 10; ++t) {
    const TreeSpace tree = random_tree(rng);
    for (int k = 0; k < 5; ++k) {
      TreePoint target;
      const LogMetric rho = random_member(tree, rng, &target);
      const TreeProjection pr = project_metric_tree(tree, rho);
      ++checked;
      if (pr.gap != 0 || !same_point(tree, pr.point, target))
        return {false, "gap " + to_fraction(pr.gap) + " on sample " +
                           std::to_string(checked)};
    }
  }
  return {true, "50 members across 10 trees, every gap exactly 0"};
}

// ------------------------------------------------------------------------- 4

Outcome tree_extension() {
  Rng rng(103);
  for (int pair = 0; pair < 20; ++pair) {
    const TreeSpace t = random_tree(rng);
    auto [copy, f] = shuffled_copy(t, rng);
    auto ext = tree_moebius_extend(t, copy, f);
    if (!std::holds_alternative<TreeIsometry>(ext))
      return {false, "cross-ratio witness on an isometric pair"};
    const TreeIsometry& iso = std::get<TreeIsometry>(ext);

    std::vector<TreePoint> pts, images;
    for (int k = 0; k < 15; ++k) {
      pts.push_back(random_tree_point(t, rng));
      images.push_back(iso.map(pts.back()));
    }
    int distances = 0;
    for (std::size_t i = 0; i < pts.size() && distances < 100; ++i)
      for (std::size_t j = i + 1; j < pts.size() && distances < 100; ++j, ++distances)
        if (tree_distance(copy, images[i], images[j]) != tree_distance(t, pts[i], pts[j]))
          return {false, "distance not preserved exactly"};

    const int e = rng.range(0, t.end_count() - 1);
    const Rational big = t.core_size() + 6;
    const TreePoint a{t.ray_segment(e), big};
    const TreePoint fa = iso.map(a);
    const TreePoint fb = iso.map(TreePoint{t.ray_segment(e), big + 3});
    if (fa.segment != copy.ray_segment(f.to[e]) || fb.offset != fa.offset + 3)
      return {false, "boundary value mismatch along a ray"};
  }
  return {true, "20 pairs, 100 exact distances each, boundary values verified"};
}

// ------------------------------------------------------------------------- 5

Outcome disk_embedding_isometry() {
  Rng rng(105);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const DiskPoint x = random_disk_point_at(rng, rng.uniform(0.0, 4.0));
    const DiskPoint y = random_disk_point_at(rng, rng.uniform(0.0, 4.0));
    const double err = std::abs(visual_class_distance(x, y) - disk_distance(x, y));
    worst = std::max(worst, err);
  }
  return {worst <= 1e-6, "worst |sup - d| = " + fmt(worst) + " over 100 pairs"};
}

// ------------------------------------------------------------------------- 6

Outcome moebius_cross_ratio_invariance() {
  Rng rng(107);
  const DiskPoint o = disk_origin();
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const MoebiusDisk m = random_moebius(rng);
    const auto q = random_separated_quad(rng, 0.05);
    auto lcr = [&](const std::array<CirclePoint, 4>& p) {
      return visual_log(o, p[0], p[2]) + visual_log(o, p[1], p[3]) -
             visual_log(o, p[0], p[3]) - visual_log(o, p[1], p[2]);
    };
    const std::array<CirclePoint, 4> im{m.apply(q[0]), m.apply(q[1]), m.apply(q[2]),
                                        m.apply(q[3])};
    worst = std::max(worst, std::abs(std::expm1(lcr(im) - lcr(q))));
  }
  return {worst <= 1e-10, "worst relative error " + fmt(worst) + " over 500 samples"};
}

// ------------------------------------------------------------------------- 7

Outcome distortion_identity() {
  const std::vector<std::vector<SinTerm>> families{
      {{1, 0.2, 0.0}},
      {{1, 0.1, 1.0}, {2, 0.05, 2.0}},
      {{1, 0.15, 0.5}},
      {{2, 0.1, 0.9}},
      {{1, 0.05, 0.0}, {3, 0.05, 1.5}},
  };
  Rng rng(109);
  double worst = 0.0;
  for (const auto& terms : families) {
    if (sinusoidal_budget(terms) > 0.3) return {false, "test family out of budget"};
    const CircleMap f = sinusoidal_map(terms);
    for (int k = 0; k < 100; ++k)
      worst = std::max(worst, distortion_residual(f, random_separated_quad(rng, 0.1)));
  }
  return {worst <= 1e-6, "worst residual " + fmt(worst) + " over 5 x 100 quadruples"};
}

// ------------------------------------------------------------------------- 8

Outcome flip_deviation_bound() {
  Rng rng(111);
  const std::vector<CircleMap> diffeos{
      sinusoidal_map({{1, 0.2, 0.0}}),
      sinusoidal_map({{1, 0.15, 1.1}, {2, 0.05, 0.4}}),
      sinusoidal_map({{2, 0.1, 2.2}, {3, 0.04, 5.1}}),
  };
  double worst = 0.0;
  for (const auto& f : diffeos)
    for (int k = 0; k < 100; ++k)
      worst = std::max(worst, flip_deviation(f, random_geodesic(rng)));
  if (worst > 1e-6) return {false, "diffeo deviation " + fmt(worst)};
  double worst_m = 0.0;
  for (int k = 0; k < 100; ++k)
    worst_m = std::max(
        worst_m, flip_deviation(moebius_boundary_map(random_moebius(rng)),
                                random_geodesic(rng)));
  return {worst_m <= 1e-9, "diffeos " + fmt(worst) + ", Moebius " + fmt(worst_m)};
}

// ------------------------------------------------------------------------- 9

Outcome gmvt_sandwich() {
  const CircleMap f = sinusoidal_map({{1, 0.2, 0.0}});
  const double s_sup = schwarzian_sup(f, 128);
  Rng rng(113);
  PropertyCheck check("sandwich");
  for (int k = 0; k < 1000; ++k) sandwich_case(check, f, rng, s_sup);
  PropertyResult r = check.take();
  return {r.pass, "1000 samples, bound 4*" + fmt(s_sup) + " + 1e-6, worst " + fmt(r.worst)};
}

// ------------------------------------------------------------------------ 10

Outcome cocycle_identity() {
  Rng rng(115);
  const CircleMap f = sinusoidal_map({{1, 0.2, 0.0}});
  const CircleMap g = sinusoidal_map({{2, 0.1, 0.3}});
  const CircleMap fi = inverse_map(f);
  double worst = 0.0;
  int done = 0;
  while (done < 200) {
    const CirclePoint a = circle_point(rng.uniform(0.0, kTwoPi));
    const CirclePoint b = circle_point(rng.uniform(0.0, kTwoPi));
    if (chordal(a, b) < 0.1) continue;
    ++done;
    worst = std::max(worst, cocycle_residual(f, g, a, b));
    worst = std::max(worst, cocycle_residual(f, fi, a, b));
  }
  return {worst <= 1e-7, "worst residual " + fmt(worst) + " over 200 samples"};
}

// ------------------------------------------------------------------------ 11

Outcome distance_difference_limit() {
  const CircleMap f = sinusoidal_map({{1, 0.2, 0.0}});
  Rng rng(117);
  double worst = 0.0;
  int done = 0;
  while (done < 20) {
    const CirclePoint xi = circle_point(rng.uniform(0.0, kTwoPi));
    const CirclePoint eta = circle_point(rng.uniform(0.0, kTwoPi));
    if (chordal(xi, eta) < 0.3) continue;
    ++done;
    const DiskPoint x = random_disk_point(rng, 0.5);
    const double s = integrated_schwarzian(f, xi, eta).value;
    const auto prof = distance_diff_profile(f, x, xi, eta, {15.0});
    worst = std::max(worst, std::abs(prof[0] - s));
  }
  return {worst <= 1e-4, "worst |profile(15) - S| = " + fmt(worst) + " over 20 pairs"};
}

// ------------------------------------------------------------------------ 12

Outcome density_on_the_disk() {
  Rng rng(119);
  const double bound = 0.5 * std::log(2.0) + 1e-3;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    auto smp = sample_disk_metric(rng);
    if (!smp) return {false, "sampler exhausted its attempts"};
    const DiskProjection pr = project_disk_metric(smp->metric);
    if (!pr.converged) return {false, "projection not converged"};
    worst = std::max(worst, pr.gap);
    if (pr.gap > bound)
      return {false, "gap " + fmt(pr.gap) + " exceeds " + fmt(bound)};
  }
  return {true, "20 admissible samples, worst gap " + fmt(worst) + " <= " + fmt(bound)};
}

// ------------------------------------------------------------------------ 13

Outcome moebius_extension_qi() {
  Rng rng(121);
  const MoebiusDisk m = random_moebius(rng);
  const auto ext = MoebiusDiskExtension::from_matrix(m);
  const double bound = std::log(2.0) + 1e-3;

  std::vector<DiskPoint> pts, images;
  for (int k = 0; k < 21; ++k) {
    pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
    images.push_back(ext.map(pts.back()));
  }
  double worst = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++pairs;
      worst = std::max(worst, std::abs(disk_distance(images[i], images[j]) -
                                       disk_distance(pts[i], pts[j])));
    }
  if (worst > bound) return {false, "defect " + fmt(worst) + " over " + std::to_string(pairs)};

  const auto inv_ext = MoebiusDiskExtension::from_matrix(m.inverse());
  double worst_density = 0.0;
  for (int k = 0; k < 50; ++k) {
    const DiskPoint probe = random_disk_point_at(rng, rng.uniform(0.0, 3.0));
    worst_density =
        std::max(worst_density, disk_distance(ext.map(inv_ext.map(probe)), probe));
  }
  return {worst_density <= bound, "defect " + fmt(worst) + " over " + std::to_string(pairs) +
                                      " pairs; density " + fmt(worst_density) +
                                      " over 50 probes"};
}

// ------------------------------------------------------------------------ 14

Outcome conformal_extension_bound() {
  Rng rng(123);
  const std::vector<CircleMap> diffeos{
      sinusoidal_map({{1, 0.2, 0.0}}),
      sinusoidal_map({{1, 0.15, 1.1}, {2, 0.05, 0.4}}),
  };
  std::string detail;
  for (const auto& f : diffeos) {
    const ConformalExtension ce(f);
    const double bound = std::log(2.0) + 12.0 * ce.schwarzian_bound() + 1e-3;
    std::vector<DiskPoint> pts, images;
    for (int k = 0; k < 11; ++k) {
      pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
      const auto r = ce.map(pts.back());
      if (!r.converged) return {false, "projection not converged"};
      images.push_back(r.point);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        worst = std::max(worst, std::abs(disk_distance(images[i], images[j]) -
                                         disk_distance(pts[i], pts[j])));
    if (worst > bound)
      return {false, "defect " + fmt(worst) + " exceeds " + fmt(bound)};
    detail += (detail.empty() ? "" : "; ") + ("defect " + fmt(worst) + " <= " + fmt(bound));
  }
  return {true, detail};
}

// ------------------------------------------------------------------------ 15

Outcome classification_oracle() {
  Rng rng(125);
  const DiskPoint o = disk_origin();
  int agreements = 0;
  for (int k = 0; k < 300; ++k) {
    const HalfPlaneMatrix hm = random_halfplane_matrix(rng, 1e-3);
    const MapClass truth = classify_by_trace(hm);
    const ClassificationRun run = classify_moebius_map(hm.to_disk(), o);
    const bool agree =
        (truth == MapClass::elliptic && run.result.kind == Classification::Kind::elliptic) ||
        (truth == MapClass::parabolic &&
         run.result.kind == Classification::Kind::parabolic) ||
        (truth == MapClass::hyperbolic &&
         run.result.kind == Classification::Kind::hyperbolic);
    if (!agree) return {false, "disagreement at trace " + fmt(hm.trace())};
    ++agreements;
    if (run.result.fixed_forward) {
      const CircleMap fm = moebius_boundary_map(hm.to_disk());
      const CirclePoint fix = *run.result.fixed_forward;
      if (chordal(fm(fix), fix) > 1e-6) return {false, "reported direction not fixed"};
    }
  }
  // exact parabolic instances and their boundary dynamics
  for (const HalfPlaneMatrix hm :
       {HalfPlaneMatrix::normalized(1, 1, 0, 1), HalfPlaneMatrix::normalized(1, 0, 1, 1)}) {
    const ClassificationRun run = classify_moebius_map(hm.to_disk(), o);
    if (run.result.kind != Classification::Kind::parabolic)
      return {false, "exact parabolic misclassified"};
    const CircleMap fm = moebius_boundary_map(hm.to_disk());
    const CircleMap fmi = moebius_boundary_map(hm.to_disk().inverse());
    CirclePoint cur = circle_point(run.result.fixed_forward->theta + 2.2);
    for (int n = 0; n < 4000; ++n) cur = fm(cur);
    if (chordal(cur, *run.result.fixed_forward) > 5e-3)
      return {false, "forward boundary orbit does not converge"};
    cur = circle_point(run.result.fixed_forward->theta + 2.2);
    for (int n = 0; n < 4000; ++n) cur = fmi(cur);
    if (chordal(cur, *run.result.fixed_forward) > 5e-3)
      return {false, "backward boundary orbit does not converge"};
  }
  return {true, std::to_string(agreements) + "/300 oracle agreements, parabolic dynamics ok"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"tree exact identity suite (chain rule, mean value, max*min, metric axioms, "
       "embedding)",
       tree_exact_identities},
      {"Lipschitz bound on derivative functions, interval-certified", lipschitz_certified},
      {"tree projection surjectivity: gap exactly 0", tree_surjectivity},
      {"tree Moebius extension: exact isometry with prescribed boundary", tree_extension},
      {"disk embedding isometry via the circle sup", disk_embedding_isometry},
      {"cross-ratio invariance under Moebius transforms", moebius_cross_ratio_invariance},
      {"cross-ratio distortion identity", distortion_identity},
      {"flip deviation of the induced conjugacy", flip_deviation_bound},
      {"conformal mean value sandwich", gmvt_sandwich},
      {"Schwarzian cocycle identity", cocycle_identity},
      {"distance-difference limit equals the Schwarzian", distance_difference_limit},
      {"projection gaps within half log 2 on the disk", density_on_the_disk},
      {"Moebius extension quasi-isometry and image density", moebius_extension_qi},
      {"conformal extension within the Schwarzian-corrected bound",
       conformal_extension_bound},
      {"dynamical classification against the trace oracle", classification_oracle},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%02zu] %s  %s (%.1fs)%s%s\n", i + 1, out.pass ? "PASS" : "FAIL",
                criteria[i].name.c_str(), secs, out.detail.empty() ? "" : " — ",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}

#include <catch2/catch_amalgamated.hpp>

#include <catb/extension.hpp>
#include <catb/sampling.hpp>
#include <catb/suite_util.hpp>

using namespace catb;
using Catch::Approx;

namespace {

TreeSpace spider() {
  return TreeSpace::build({"c"}, {},
                          {{"e1", "c"}, {"e2", "c"}, {"e3", "c"}, {"e4", "c"}});
}

}  // namespace

TEST_CASE("embeddings") {
  SECTION("spider center embeds to the all-ones metric") {
    const TreeSpace s = spider();
    const LogMetric rc = visual_log_metric(s, vertex_point(s, 0));
    for (const auto& v : rc.packed()) CHECK(v == 0);
  }
  SECTION("disk origin embeds to the half-chordal metric") {
    const DiskMetric m = embed_disk_point(disk_origin());
    for (double v : m.grid) CHECK(std::abs(v) <= 1e-15);
  }
  SECTION("embedding isometry") {
    Rng rng(3);
    const TreeSpace t = random_tree(rng);
    const TreePoint a = random_tree_point(t, rng), b = random_tree_point(t, rng);
    CHECK(class_distance(visual_log_metric(t, a), visual_log_metric(t, b)) ==
          tree_distance(t, a, b));
    for (int k = 0; k < 6; ++k) {
      const DiskPoint x = random_disk_point_at(rng, rng.uniform(0.2, 6.0));
      const DiskPoint y = random_disk_point_at(rng, rng.uniform(0.2, 6.0));
      CHECK(std::abs(class_distance(embed_disk_point(x), embed_disk_point(y)) -
                     disk_distance(x, y)) <= 1e-6);
    }
  }
}

TEST_CASE("push-forward") {
  SECTION("identity leaves metrics alone") {
    const DiskMetric m = embed_disk_point(disk_point(Complex(0.4, -0.2)));
    const DiskMetric p = pushforward_disk(identity_map(), identity_map(), m);
    CHECK(class_distance(m, p) <= 1e-9);
  }
  SECTION("tree end swap permutes the table") {
    const TreeSpace s = spider();
    const TreePoint x{s.ray_segment(0), Rational(1, 2)};
    const LogMetric rx = visual_log_metric(s, x);
    auto f = EndBijection::from_labels(
        s, s, {{"e1", "e2"}, {"e2", "e1"}, {"e3", "e3"}, {"e4", "e4"}});
    const LogMetric pushed = pushforward_log_metric(f, rx, s.boundary());
    // the pushed metric is the visual metric halfway up leg 2
    const LogMetric expected =
        visual_log_metric(s, TreePoint{s.ray_segment(1), Rational(1, 2)});
    CHECK(pushed.packed() == expected.packed());
  }
  SECTION("class-distance isometry on the disk") {
    Rng rng(5);
    const MoebiusDisk m = random_moebius(rng);
    const CircleMap fm = moebius_boundary_map(m), fmi = moebius_boundary_map(m.inverse());
    for (int k = 0; k < 5; ++k) {
      const DiskPoint x = random_disk_point(rng, 0.8), y = random_disk_point(rng, 0.8);
      const double before = class_distance(embed_disk_point(x), embed_disk_point(y));
      const double after = class_distance(pushforward_disk(fm, fmi, embed_disk_point(x)),
                                          pushforward_disk(fm, fmi, embed_disk_point(y)));
      CHECK(std::abs(after - before) <= 1e-8);
    }
  }
  SECTION("non-Moebius maps are rejected with a witness") {
    const CircleMap f = sinusoidal_map({{1, 0.2, 0.0}});
    CHECK(moebius_defect(f).has_value());
    CHECK_THROWS_AS(pushforward_disk(f, inverse_map(f), embed_disk_point(disk_origin())),
                    NotMoebiusError);
    Rng rng(7);
    CHECK(!moebius_defect(moebius_boundary_map(random_moebius(rng))).has_value());
  }
}

TEST_CASE("projection dispatch") {
  SECTION("embedded points project to themselves") {
    Rng rng(9);
    const TreeSpace t = random_tree(rng);
    const TreePoint a = random_tree_point(t, rng);
    auto pr = project_metric_tree(t, visual_log_metric(t, a));
    CHECK(pr.gap == 0);
    CHECK(same_point(t, pr.point, a));

    const DiskPoint x = random_disk_point_at(rng, 2.5);
    auto dp = project_disk_metric(embed_disk_point(x));
    CHECK(dp.converged);
    CHECK(disk_distance(dp.point, x) <= 1e-6);
    CHECK(std::abs(dp.gap) <= 1e-6);
  }

  SECTION("sampled admissible disk metrics stay within the density bound") {
    Rng rng(11);
    for (int k = 0; k < 3; ++k) {
      auto smp = sample_disk_metric(rng);
      REQUIRE(smp.has_value());
      CHECK(smp->checks.antipodal_defect <= 1e-6);
      CHECK(smp->checks.triangle_defect <= 1e-8);
      auto dp = project_disk_metric(smp->metric);
      CHECK(dp.converged);
      CHECK(dp.gap <= 0.5 * std::log(2.0) + 1e-3);
    }
  }
}

TEST_CASE("Moebius extension on the disk") {
  Rng rng(13);
  const MoebiusDisk m = random_moebius(rng);
  const auto ext = MoebiusDiskExtension::from_matrix(m);

  SECTION("reproduces the isometry pointwise") {
    for (int k = 0; k < 5; ++k) {
      const DiskPoint x = random_disk_point_at(rng, rng.uniform(0.0, 4.0));
      CHECK(disk_distance(ext.map(x), m.apply(x)) <= 1e-4);
    }
  }

  SECTION("identity boundary map extends to the identity") {
    const auto idext = MoebiusDiskExtension::from_matrix(MoebiusDisk::identity());
    const DiskPoint x = random_disk_point(rng, 0.7);
    CHECK(disk_distance(idext.map(x), x) <= 1e-4);
  }

  SECTION("additive distortion and image density within log 2") {
    std::vector<DiskPoint> pts, images;
    for (int k = 0; k < 7; ++k) {
      pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
      images.push_back(ext.map(pts.back()));
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        CHECK(std::abs(disk_distance(images[i], images[j]) -
                       disk_distance(pts[i], pts[j])) <= std::log(2.0) + 1e-3);

    const auto inv_ext = MoebiusDiskExtension::from_matrix(m.inverse());
    for (int k = 0; k < 3; ++k) {
      const DiskPoint probe = random_disk_point_at(rng, rng.uniform(0.0, 3.0));
      CHECK(disk_distance(ext.map(inv_ext.map(probe)), probe) <= std::log(2.0) + 1e-3);
    }
  }

  SECTION("general boundary maps must preserve cross-ratios") {
    CHECK_THROWS_AS(MoebiusDiskExtension::from_map(sinusoidal_map({{1, 0.2, 0.0}})),
                    NotMoebiusError);
    const auto ok = MoebiusDiskExtension::from_map(moebius_boundary_map(m));
    const DiskPoint x = random_disk_point(rng, 0.5);
    CHECK(disk_distance(ok.map(x), m.apply(x)) <= 1e-4);
  }
}

TEST_CASE("admissible sampler statistics") {
  Rng rng(17);
  auto smp = sample_disk_metric(rng);
  REQUIRE(smp.has_value());
  CHECK(smp->attempts >= 1);
  CHECK(smp->fixed_point_residual <= 1e-10);
  // the sample is genuinely not a visual metric
  auto dp = project_disk_metric(smp->metric);
  CHECK(dp.gap > 1e-3);
}

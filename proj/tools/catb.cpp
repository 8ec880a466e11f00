// Command-line front end: verification suites and single queries over the
// tree and disk models.

#include <CLI11.hpp>

#include <catb/classifier.hpp>
#include <catb/extension.hpp>
#include <catb/suites.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace catb;

Json tree_point_json(const TreeSpace& t, const TreePoint& p) {
  Json out{{"segment", p.segment}, {"offset", to_fraction(p.offset)}};
  if (t.segment_is_ray(p.segment)) {
    out["kind"] = "ray";
    out["end"] = t.end_labels()[t.ray_index(p.segment)];
    out["from_vertex"] = t.vertex_labels()[t.ray(p.segment).attach];
  } else {
    out["kind"] = "edge";
    out["from_vertex"] = t.vertex_labels()[t.edge(p.segment).u];
    out["to_vertex"] = t.vertex_labels()[t.edge(p.segment).v];
  }
  return out;
}

TreeSpace load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file '" + path + "'");
  return parse_tree(in);
}

LogMetric load_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metric file '" + path + "'");
  return parse_log_metric(in);
}

CircleMap load_diffeo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open diffeo file '" + path + "'");
  return sinusoidal_map(parse_diffeo(in));
}

// Half-plane matrices come as four reals; disk matrices as the eight real
// components of the 2x2 complex matrix, whose SU(1,1) shape is checked.
MoebiusDisk matrix_from_args(const std::vector<double>& m, const std::string& model) {
  if (model == "halfplane") {
    if (m.size() != 4)
      throw std::runtime_error("half-plane matrix needs four real entries");
    return HalfPlaneMatrix::normalized(m[0], m[1], m[2], m[3]).to_disk();
  }
  if (model != "disk") throw std::runtime_error("model must be 'halfplane' or 'disk'");
  if (m.size() != 8)
    throw std::runtime_error("disk matrix needs eight real components (a b c d as re,im)");
  const Complex a{m[0], m[1]}, b{m[2], m[3]}, c{m[4], m[5]}, d{m[6], m[7]};
  if (std::abs(c - std::conj(b)) > 1e-9 || std::abs(d - std::conj(a)) > 1e-9)
    throw std::runtime_error("disk matrix must have the form (a, b; conj b, conj a)");
  return MoebiusDisk::su11(a, b);
}

Json record(const std::string& command, Json inputs, std::uint64_t seed) {
  return Json{{"command", command}, {"inputs", std::move(inputs)}, {"seed", seed},
              {"results", Json::array()}, {"residuals", Json::array()}, {"status", "ok"}};
}

int emit(Json rec, bool ok = true) {
  std::cout << rec.dump(2) << std::endl;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary geometry of CAT(-1) model spaces: verification and queries"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 42;
  int cases = 200;
  unsigned precision_bits = 128;
  int horizon = 50;
  int samples = 0;
  double tol = 0.05;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--cases", cases, "number of random cases");
  app.add_option("--precision-bits", precision_bits, "interval arithmetic precision");
  app.add_option("--N", horizon, "orbit horizon");
  app.add_option("--samples", samples, "sample count where applicable");
  app.add_option("--tol", tol, "tolerance knob (cluster tolerance for classify)");

  auto* verify = app.add_subcommand("verify", "run a property suite");
  std::string suite = "all";
  bool no_timing = false;
  verify->add_option("--suite", suite, "core|tree|disk|schwarzian|extension|classify|all");
  verify->add_flag("--no-timing", no_timing, "omit wall time for bit-exact diffs");

  auto* crossratio = app.add_subcommand("crossratio", "log cross-ratio of a quadruple");
  std::string cr_tree, cr_metric;
  std::vector<std::string> cr_quad;
  crossratio->add_option("--tree", cr_tree, "tree file");
  crossratio->add_option("--metric", cr_metric, "metric file");
  crossratio->add_option("--quad", cr_quad, "four point labels")->expected(4);

  auto* project = app.add_subcommand("project", "nearest visual metric to a given metric");
  std::string pr_tree, pr_metric;
  project->add_option("--tree", pr_tree, "tree file")->required();
  project->add_option("--metric", pr_metric, "metric file")->required();

  auto* classify = app.add_subcommand("classify", "orbit trichotomy of a Moebius self-map");
  std::vector<double> cl_matrix;
  std::string cl_model = "halfplane";
  double cl_radius = 10.0;
  classify->add_option("--matrix", cl_matrix, "matrix entries")->expected(4, 8)->required();
  classify->add_option("--model", cl_model, "halfplane|disk");
  classify->add_option("--radius", cl_radius, "radius threshold");

  auto* schwarzian = app.add_subcommand("schwarzian", "integrated Schwarzian of a diffeo");
  std::string sw_diffeo;
  std::vector<double> sw_pair;
  bool sw_sup = false;
  schwarzian->add_option("--diffeo", sw_diffeo, "diffeo file")->required();
  schwarzian->add_option("--pair", sw_pair, "two angles")->expected(2);
  schwarzian->add_flag("--sup", sw_sup, "also estimate the sup over pairs");

  auto* extend = app.add_subcommand("extend", "extend a boundary map to the space");
  std::string ex_from, ex_to, ex_map_arg;
  std::vector<double> ex_matrix;
  std::string ex_model = "halfplane";
  extend->add_option("--from-tree", ex_from, "source tree file");
  extend->add_option("--to-tree", ex_to, "target tree file");
  extend->add_option("--map", ex_map_arg, "end bijection 'e1:f1,e2:f2,...'");
  extend->add_option("--matrix", ex_matrix, "disk case: matrix entries")->expected(4, 8);
  extend->add_option("--model", ex_model, "halfplane|disk");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      SuiteOptions opt;
      opt.seed = seed;
      opt.cases = cases;
      opt.precision_bits = precision_bits;
      opt.horizon = horizon;
      opt.samples = samples;
      std::vector<std::string> names =
          suite == "all" ? suite_names() : std::vector<std::string>{suite};
      Json out = Json::array();
      bool ok = true;
      for (const auto& name : names) {
        SuiteReport rep = run_suite(name, opt);
        ok = ok && rep.pass();
        out.push_back(rep.to_json(!no_timing));
      }
      std::cout << (out.size() == 1 ? out[0] : out).dump(2) << std::endl;
      return ok ? 0 : 1;
    }

    if (crossratio->parsed()) {
      if (cr_quad.size() != 4) throw std::runtime_error("--quad needs four labels");
      Json rec = record("crossratio",
                        {{"tree", cr_tree}, {"metric", cr_metric}, {"quad", cr_quad}}, seed);
      const std::array<std::string, 4> quad{cr_quad[0], cr_quad[1], cr_quad[2], cr_quad[3]};
      Rational value;
      if (!cr_tree.empty()) {
        const TreeSpace t = load_tree(cr_tree);
        value = cross_ratio_log(visual_log_metric(t, tree_basepoint(t)), quad);
      } else if (!cr_metric.empty()) {
        value = cross_ratio_log(load_metric(cr_metric), quad);
      } else {
        throw std::runtime_error("give --tree or --metric");
      }
      rec["results"].push_back({{"log_cross_ratio", to_fraction(value)},
                                {"cross_ratio", std::exp(to_double(value))}});
      return emit(rec);
    }

    if (project->parsed()) {
      Json rec = record("project", {{"tree", pr_tree}, {"metric", pr_metric}}, seed);
      const TreeSpace t = load_tree(pr_tree);
      const LogMetric rho = load_metric(pr_metric);
      TreeProjection pr = project_metric_tree(t, rho, precision_bits);
      rec["results"].push_back(
          {{"point", tree_point_json(t, pr.point)}, {"gap", to_fraction(pr.gap)}});
      rec["residuals"].push_back(to_double(pr.gap));
      return emit(rec);
    }

    if (classify->parsed()) {
      Json rec = record("classify", {{"matrix", cl_matrix}, {"model", cl_model}}, seed);
      const MoebiusDisk m = matrix_from_args(cl_matrix, cl_model);
      if (cl_model == "halfplane") {
        const HalfPlaneMatrix hm =
            HalfPlaneMatrix::normalized(cl_matrix[0], cl_matrix[1], cl_matrix[2], cl_matrix[3]);
        rec["results"].push_back({{"trace_oracle", to_string(classify_by_trace(hm))},
                                  {"trace", hm.trace()}});
      }
      const ClassificationRun run =
          classify_moebius_map(m, disk_origin(), horizon, cl_radius, tol);
      Json res{{"class", to_string(run.result.kind)},
               {"N_used", run.N_used},
               {"orbit_diameter", run.result.diameter},
               {"growth_rate", run.result.growth_rate}};
      if (!run.result.note.empty()) res["note"] = run.result.note;
      if (run.result.fixed_forward) res["fixed_forward"] = run.result.fixed_forward->theta;
      if (run.result.fixed_backward)
        res["fixed_backward"] = run.result.fixed_backward->theta;
      rec["results"].push_back(std::move(res));
      return emit(rec, run.result.kind != Classification::Kind::undecided);
    }

    if (schwarzian->parsed()) {
      Json rec = record("schwarzian", {{"diffeo", sw_diffeo}, {"pair", sw_pair}}, seed);
      const CircleMap f = load_diffeo(sw_diffeo);
      if (sw_pair.size() == 2) {
        const SchwarzianValue s =
            integrated_schwarzian(f, circle_point(sw_pair[0]), circle_point(sw_pair[1]));
        rec["results"].push_back({{"value", s.value}});
      }
      if (sw_sup || sw_pair.empty())
        rec["results"].push_back({{"sup_estimate", schwarzian_sup(f)}});
      return emit(rec);
    }

    if (extend->parsed()) {
      Rng rng(seed);
      if (!ex_from.empty()) {
        Json rec = record("extend",
                          {{"from", ex_from}, {"to", ex_to}, {"map", ex_map_arg}}, seed);
        const TreeSpace a = load_tree(ex_from);
        const TreeSpace b = load_tree(ex_to);
        std::vector<std::pair<std::string, std::string>> pairs;
        std::istringstream in(ex_map_arg);
        std::string tokpair;
        while (std::getline(in, tokpair, ',')) {
          auto colon = tokpair.find(':');
          if (colon == std::string::npos)
            throw std::runtime_error("--map entries look like 'source:target'");
          pairs.emplace_back(tokpair.substr(0, colon), tokpair.substr(colon + 1));
        }
        auto ext = tree_moebius_extend(a, b, EndBijection::from_labels(a, b, pairs),
                                       precision_bits);
        if (auto* w = std::get_if<CrossRatioWitness>(&ext)) {
          rec["status"] = "not moebius";
          rec["results"].push_back({{"witness_quad", w->quad},
                                    {"source_log_cross_ratio", to_fraction(w->source)},
                                    {"image_log_cross_ratio", to_fraction(w->image)}});
          return emit(rec, false);
        }
        const TreeIsometry& iso = std::get<TreeIsometry>(ext);
        const int pair_count = samples > 0 ? samples : 50;
        bool all = true;
        for (int k = 0; k < pair_count; ++k) {
          TreePoint p = random_tree_point(a, rng), q = random_tree_point(a, rng);
          all = all && iso.preserves(p, q);
        }
        rec["results"].push_back({{"isometry", true},
                                  {"pairs_checked", pair_count},
                                  {"distances_preserved_exactly", all}});
        rec["residuals"].push_back(0.0);
        return emit(rec, all);
      }
      // disk case
      Json rec = record("extend", {{"matrix", ex_matrix}, {"model", ex_model}}, seed);
      const MoebiusDisk m = matrix_from_args(ex_matrix, ex_model);
      const auto ext = MoebiusDiskExtension::from_matrix(m);
      const int pair_count = samples > 0 ? samples : 40;
      std::vector<DiskPoint> pts, images;
      double worst = 0.0;
      for (int k = 0; k < pair_count; ++k) {
        pts.push_back(random_disk_point_at(rng, rng.uniform(0.0, 4.0)));
        images.push_back(ext.map(pts.back()));
      }
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          worst = std::max(worst, std::abs(disk_distance(images[i], images[j]) -
                                           disk_distance(pts[i], pts[j])));
      const double bound = std::log(2.0) + 1e-3;
      rec["results"].push_back({{"pairs_checked", pair_count * (pair_count - 1) / 2},
                                {"worst_defect", worst},
                                {"bound", bound}});
      rec["residuals"].push_back(worst);
      return emit(rec, worst <= bound);
    }
  } catch (const ParseError& e) {
    std::cout << Json{{"status", "parse error"}, {"error", e.what()}, {"line", e.line}}
                     .dump(2)
              << std::endl;
    return 2;
  } catch (const NotMoebiusError& e) {
    std::cout << Json{{"status", "not moebius"}, {"error", e.what()},
                      {"witness", e.witness}}
                     .dump(2)
              << std::endl;
    return 2;
  } catch (const MembershipRejected& e) {
    std::cout << Json{{"status", "rejected"}, {"error", e.what()}}.dump(2) << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cout << Json{{"status", "error"}, {"error", e.what()}}.dump(2) << std::endl;
    return 2;
  }
  return 0;
}

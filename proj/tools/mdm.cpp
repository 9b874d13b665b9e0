// mdm: command-line front end for the maximal distance minimizer toolkit.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "mdm/classify.hpp"
#include "mdm/constructions.hpp"
#include "mdm/coverage.hpp"
#include "mdm/derivative.hpp"
#include "mdm/errors.hpp"
#include "mdm/experiments.hpp"
#include "mdm/io.hpp"
#include "mdm/optimizer.hpp"
#include "mdm/steiner.hpp"

using namespace mdm;

namespace {

constexpr int kOk = 0, kFailed = 1, kInputError = 2;

struct Common {
  std::string scene, out;
  std::uint64_t seed = 0;
  int samples = 0;
  std::optional<double> tol;
};

void add_common(CLI::App* app, Common& c, bool scene_required) {
  auto* s = app->add_option("--scene", c.scene, "scene or network JSON file");
  if (scene_required) s->required();
  app->add_option("--out", c.out, "output path (stdout when omitted)");
  app->add_option("--seed", c.seed, "seed for randomized steps");
  app->add_option("--samples", c.samples, "sample lattice size")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "tolerance override");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(out, text);
  }
}

Scene scene_with_network(const std::string& path) {
  Scene sc = read_scene(path);
  if (!sc.net) throw ParseError("scene has no network");
  return sc;
}

int cmd_evaluate(const Common& c) {
  const Scene sc = scene_with_network(c.scene);
  const Network& net = *sc.net;
  const ConvexCurve curve = ConvexCurve::from_spec(sc.curve);
  const int n = c.samples > 0 ? c.samples : 4096;
  const double tau = c.tol.value_or(kTauStat);
  Json rep = {{"scene", sc.name}, {"r", sc.r}};
  bool ok = true;
  const StructureReport structure = check_structure(net);
  rep["structure"] = structure_to_json(structure);
  ok = ok && structure.ok();
  if (structure.ok()) {
    const auto F = max_distance_functional(curve, net, n);
    const double tau_F = curve.perimeter() / n;
    rep["F_M"] = F.value;
    rep["tau_F"] = tau_F;
    rep["length"] = total_length(net);
    rep["coverage_ok"] = F.value <= sc.r + tau_F;
    ok = ok && F.value <= sc.r + tau_F;
    try {
      const auto recs = classify_points(net, curve, sc.r);
      const auto comps = component_diagnostics(net, curve, sc.r, recs);
      const auto st = check_stationarity(net, curve, sc.r, recs, tau);
      rep["records"] = records_to_json(recs);
      rep["components"] = components_to_json(comps);
      rep["stationarity"] = stationarity_to_json(st);
      for (const auto& k : comps) ok = ok && k.ok();
      ok = ok && st.ok();
    } catch (const Error& e) {
      rep["diagnostic_error"] = e.what();
      ok = false;
    }
  } else {
    for (const auto& f : structure.failures) std::cerr << f << '\n';
  }
  rep["pass"] = ok;
  emit(c.out, rep.dump(2));
  return ok ? kOk : kFailed;
}

struct ConstructArgs {
  std::string kind;
  double R = 5.0, r = 1.0, a = 16.0, b = 9.0, L = 40.0;
};

int cmd_construct(const Common& c, const ConstructArgs& a) {
  Scene sc;
  sc.seed = c.seed;
  sc.r = a.r;
  if (a.kind == "horseshoe") {
    ConvexCurve curve = ConvexCurve::circle({0.0, 0.0}, a.R);
    if (!c.scene.empty()) {
      const Scene in = read_scene(c.scene);
      curve = ConvexCurve::from_spec(in.curve);
      sc.r = in.r;
    }
    const Horseshoe h = build_horseshoe(curve, sc.r);
    sc.name = "horseshoe";
    sc.curve = curve.spec();
    sc.net = h.net;
    std::cerr << "length " << format_double(h.length) << '\n';
  } else if (a.kind == "rectangle") {
    const RectangleNet R = build_rectangle_net(a.a, a.b, a.r, true, c.samples > 0 ? c.samples : 4096);
    sc.name = "rectangle " + format_double(a.a) + "x" + format_double(a.b);
    sc.curve = ConvexCurve::rectangle({0.0, 0.0}, a.a, a.b).spec();
    sc.net = R.net;
    std::cerr << "length " << format_double(R.length) << " constant " << format_double(R.constant) << '\n';
  } else {
    const ComparisonReport cmp = compare_stadium(a.L, a.R, a.r, c.samples > 0 ? c.samples : 4096);
    sc.name = "stadium competitor";
    sc.curve = ConvexCurve::stadium({0.0, 0.0}, a.L, a.R).spec();
    sc.net = cmp.competitor;
    std::cerr << "cells " << cmp.cells << " competitor " << format_double(cmp.competitor_length) << " horseshoe "
              << format_double(cmp.horseshoe_length) << " winner " << cmp.winner;
    if (!cmp.caveat.empty()) std::cerr << " (" << cmp.caveat << ")";
    std::cerr << '\n';
  }
  emit(c.out, scene_to_json(sc).dump(2));
  return kOk;
}

int cmd_optimize(const Common& c, const std::string& trace_path) {
  Scene sc = scene_with_network(c.scene);
  OptimizationProblem pb;
  pb.curve = ConvexCurve::from_spec(sc.curve);
  pb.r = sc.r;
  pb.net = *sc.net;
  if (c.samples > 0) pb.n_samples = c.samples;
  if (c.tol) pb.violation_tol_rel = *c.tol;
  const OptimizationResult res = minimize_length(pb);
  sc.net = res.net;
  if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));
  std::cerr << "length " << format_double(total_length(res.net)) << " violation "
            << format_double(res.trace.final_violation_fine) << " (" << res.trace.termination << ")\n";
  emit(c.out, scene_to_json(sc).dump(2));
  return res.trace.final_violation_fine <= pb.violation_tol_rel * pb.r * 10.0 ? kOk : kFailed;
}

int cmd_derive(const Common& c, const LocalConfig& cfg) {
  const DerivativeResult d = derivative(cfg);
  Json j = {{"case", d.case_id}, {"alpha", cfg.alpha}, {"beta", cfg.beta}, {"gamma", cfg.gamma},
            {"delta", cfg.delta}, {"r", cfg.r},        {"derivative", d.value}};
  emit(c.out, j.dump(2));
  return kOk;
}

int cmd_validate(const Common& c) {
  const Network net = read_network(c.scene);
  std::vector<Point2> terminals;
  for (int v : tree_boundary(net)) terminals.push_back(net.vertex(v));
  const ValidationReport rep = validate_local_steiner(net, terminals, c.tol.value_or(kTauAngle));
  emit(c.out, validation_to_json(rep).dump(2));
  return rep.ok() ? kOk : kFailed;
}

int cmd_reproduce(const Common& c, const std::string& name, int instances, int configs) {
  ExperimentOptions opt;
  opt.out_dir = c.out;
  opt.seed = c.seed;
  opt.samples = c.samples;
  opt.instances = instances;
  opt.configs = configs;
  std::vector<std::string> names = name == "all" ? experiment_names() : std::vector<std::string>{name};
  bool all_ok = true;
  Json results = Json::array();
  for (const std::string& n : names) {
    const ExperimentResult res = run_experiment(n, opt);
    results.push_back(to_json(res));
    if (!c.out.empty()) write_text_file(c.out + "/" + n + ".json", to_json(res).dump(2));
    all_ok = all_ok && res.pass();
  }
  std::cout << (results.size() == 1 ? results[0] : results).dump(2) << '\n';
  for (const Json& r : results) std::cout << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["experiment"].get<std::string>() << '\n';
  return all_ok ? kOk : kFailed;
}

int cmd_render(const Common& c) {
  const Scene sc = read_scene(c.scene);
  std::optional<std::vector<EnergeticRecord>> recs;
  if (sc.net) {
    try {
      recs = classify_points(*sc.net, ConvexCurve::from_spec(sc.curve), sc.r);
    } catch (const Error& e) {
      std::cerr << "rendering without energetic points: " << e.what() << '\n';
    }
  }
  const std::string svg = render_svg(sc, recs ? &*recs : nullptr);
  emit(c.out, svg);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal distance minimizers: construction, optimization and diagnostics"};
  app.require_subcommand(1);
  Common common;
  ConstructArgs cargs;
  LocalConfig cfg;
  std::string trace_path, experiment;
  int instances = 10000, configs = 100;

  auto* evaluate = app.add_subcommand("evaluate", "coverage, classification and stationarity report");
  add_common(evaluate, common, true);

  auto* construct = app.add_subcommand("construct", "build a horseshoe, rectangle or stadium network");
  add_common(construct, common, false);
  construct->add_option("kind", cargs.kind, "horseshoe | rectangle | stadium")
      ->required()
      ->check(CLI::IsMember({"horseshoe", "rectangle", "stadium"}));
  construct->add_option("--R", cargs.R, "circle or stadium cap radius");
  construct->add_option("--r", cargs.r, "coverage radius");
  construct->add_option("--a", cargs.a, "rectangle width");
  construct->add_option("--b", cargs.b, "rectangle height");
  construct->add_option("--L", cargs.L, "stadium straight length");

  auto* optimize = app.add_subcommand("optimize", "length minimization with the scene topology");
  add_common(optimize, common, true);
  optimize->add_option("--trace", trace_path, "trace CSV path");

  auto* derive = app.add_subcommand("derive", "closed-form derivative for one local configuration");
  add_common(derive, common, false);
  derive->add_option("--case", cfg.case_id, "case 1..4")->required()->check(CLI::Range(1, 4));
  derive->add_option("--alpha", cfg.alpha)->required();
  derive->add_option("--beta", cfg.beta);
  derive->add_option("--gamma", cfg.gamma);
  derive->add_option("--delta", cfg.delta);
  derive->add_option("--r", cfg.r);

  auto* validate = app.add_subcommand("validate", "local Steiner tree checks on a network");
  add_common(validate, common, true);

  auto* reproduce = app.add_subcommand("reproduce", "run an acceptance experiment");
  add_common(reproduce, common, false);
  std::vector<std::string> choices = experiment_names();
  choices.push_back("all");
  reproduce->add_option("experiment", experiment, "experiment name or all")->required()->check(CLI::IsMember(choices));
  reproduce->add_option("--instances", instances, "steiner-properties suite size");
  reproduce->add_option("--configs", configs, "derivative-oracle configurations per case");

  auto* render = app.add_subcommand("render", "SVG figure of a scene");
  add_common(render, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*evaluate) return cmd_evaluate(common);
    if (*construct) return cmd_construct(common, cargs);
    if (*optimize) return cmd_optimize(common, trace_path);
    if (*derive) return cmd_derive(common, cfg);
    if (*validate) return cmd_validate(common);
    if (*reproduce) return cmd_reproduce(common, experiment, instances, configs);
    if (*render) return cmd_render(common);
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  } catch (const InvalidNetwork& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    // Unwritable outputs and bad parameters are input errors, not diagnostics.
    return kInputError;
  }
  return kInputError;
}

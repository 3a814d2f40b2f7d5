// lbs: phase portraits, large bifurcation supports and bifurcation diagrams from the command line.
//
// Exit codes: 0 ok / PASS, 1 error, 2 unresolved objects, 3 check FAIL.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lbs/io.hpp"

using namespace lbs;

namespace {

constexpr int kOk = 0, kError = 1, kUnresolved = 2, kFail = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::string model;
  std::string check;
  std::string epsilon;
  double h = 0.0;
  double tol = 0.0;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->set_help_flag("--help", "print help");  // -h would clash with --h
  sub->add_option("--config", o.config, "run config (JSON, see docs/config.md)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--model", o.model, "builtin family name, replaces the config's family");
  sub->add_option("--epsilon", o.epsilon, "parameter value, comma separated");
  sub->add_option("--h", o.h, "phase resolution for support sets");
  sub->add_option("--tol", o.tol, "integration tolerance");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--epsilon: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--epsilon: empty list");
  return out;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.model.empty()) c.family = Json{{"builtin", o.model}};
  if (!o.out.empty()) c.out = o.out;
  if (!o.check.empty()) c.check = o.check;
  if (!o.epsilon.empty()) c.epsilon = parse_list(o.epsilon);
  if (o.h < 0.0 || o.tol < 0.0) throw ConfigError("--h and --tol must be positive");
  if (o.h > 0.0) c.h = o.h;
  if (o.tol > 0.0) c.tol = o.tol;
  // round trip through the schema validates the overrides too
  return config_from_json(config_to_json(c));
}

// The output directory is left out so artifacts do not depend on where they land.
Json embedded_config(const RunConfig& c) {
  Json j = config_to_json(c);
  j.erase("out");
  return j;
}

std::string path_in(const RunConfig& c, const std::string& name) { return c.out + "/" + name; }

void dump(const RunConfig& c, const std::string& name, const Json& j) { write_file(path_in(c, name), j.dump(1) + "\n"); }

int run_portrait(RunConfig c) {
  const FieldFamily f = build_family(c);
  c.epsilon = resolved_epsilon(c, f).coords;
  const Json cfg = embedded_config(c);
  const PhasePortrait pp = compute_portrait(f, ParamPoint(c.epsilon), portrait_options(c));
  dump(c, "portrait.json", Json{{"config", cfg}, {"family", f.name()}, {"portrait", to_json(pp)}});
  write_file(path_in(c, "skeleton.svg"), skeleton_svg(pp, f, cfg));
  std::printf("family: %s\nsingular points: %zu\ncycles: %zu\nseparatrices: %zu\n", f.name().c_str(),
              pp.singular_points.size(), pp.cycles.size(), pp.separatrices.size());
  if (!pp.unresolved()) return kOk;
  for (const auto& cy : pp.cycles) {
    if (cy.multiplicity == 0) {
      std::printf("unresolved multiplicity: cycle #%d at s = %.6g, multiplier %.6g, uncertainty %.3g\n", cy.id, cy.s,
                  cy.multiplier, cy.multiplier_uncertainty);
    }
  }
  if (pp.continuum_suspected) std::printf("unresolved: continuum of closed orbits suspected\n");
  return kUnresolved;
}

int run_lbs(RunConfig c) {
  const FieldFamily f = build_family(c);
  const Json cfg = embedded_config(c);
  const LbsResult r = compute_lbs(f, c.h, lbs_options(c));
  const CheckReport p7 = check_prop7(r.lbs, r.portrait);
  dump(c, "lbs.json",
       Json{{"config", cfg},
            {"family", f.name()},
            {"lbs", to_json(r.lbs)},
            {"lbs_star", to_json(r.lbs_star)},
            {"elbs", to_json(r.elbs)},
            {"acc", to_json(r.acc)},
            {"shells", r.sweep.shells},
            {"prop7", to_json(p7)},
            {"portrait", to_json(r.portrait)}});
  write_file(path_in(c, "lbs.svg"), support_svg(r.lbs, r.portrait, f, cfg));
  std::printf("family: %s\ncomponents: %d\npoints: %zu\n", f.name().c_str(), r.lbs.component_count,
              r.lbs.points.size());
  if (r.portrait.unresolved()) {
    std::printf("unresolved: portrait at eps = 0 has unresolved objects\n");
    return kUnresolved;
  }
  return kOk;
}

void write_diagram(const RunConfig& c, const Json& cfg, const BifurcationDiagram& bd, const std::string& stem) {
  dump(c, stem + ".json", Json{{"config", cfg}, {"diagram", to_json(bd)}});
  std::ostringstream csv;
  write_diagram_csv(csv, bd, cfg);
  write_file(path_in(c, stem + ".csv"), csv.str());
  write_file(path_in(c, stem + ".svg"), diagram_svg(bd, cfg));
}

int run_diagram(RunConfig c) {
  const FieldFamily f = build_family(c);
  const Json cfg = embedded_config(c);
  const GridSpec g = GridSpec::box(f.base_dim(), c.half_width, c.h_eps);
  const BifurcationDiagram bd = scan_diagram(f, g, c.regions, diagram_options(c));
  write_diagram(c, cfg, bd, "diagram");
  std::printf("family: %s\ncurves: %zu\n", f.name().c_str(), bd.curves.size());
  for (const auto& cv : bd.curves) {
    std::printf("  %s region %d cells %zu at", to_string(cv.cls).c_str(), cv.region, cv.cells.size());
    for (double v : cv.estimate.coords) std::printf(" %.6g", v);
    std::printf("\n");
  }
  return kOk;
}

int run_verify(RunConfig c) {
  const std::string& name = c.check;
  const Json cfg = embedded_config(c);
  CheckReport rep;
  Json extra = Json::object();
  if (name == "stabilization-invariance") {
    const FieldFamily v = base_family(c);
    rep = check_stabilization_invariance(v, make_cut(c.phi, v), c.h, lbs_options(c));
  } else if (name == "split-inclusion") {
    rep = check_split_inclusion(splitting_data(c), c.h, lbs_options(c));
  } else if (name == "product-structure") {
    BifurcationDiagram bd;
    rep = verify_product_structure(splitting_data(c), GridSpec::box(2, c.half_width, c.h_eps), diagram_options(c), &bd);
    write_diagram(c, cfg, bd, "product_structure_diagram");
  } else if (name == "independence") {
    const FieldFamily f = build_family(c);
    if (c.regions.size() != 2) throw ConfigError("independence needs exactly two regions");
    BifurcationDiagram bd;
    rep = check_independence(f, c.regions[0], c.regions[1], GridSpec::box(f.base_dim(), c.half_width, c.h_eps),
                             diagram_options(c), &bd);
    write_diagram(c, cfg, bd, "independence_diagram");
    const LbsResult r = compute_lbs(f, c.h, lbs_options(c));
    rep.notes.push_back("LBS components: " + std::to_string(r.lbs.component_count));
    extra["components"] = r.lbs.component_count;
    std::printf("components: %d\n", r.lbs.component_count);
  } else if (name == "prop7") {
    const FieldFamily f = build_family(c);
    const LbsResult r = compute_lbs(f, c.h, lbs_options(c));
    rep = check_prop7(r.lbs, r.portrait);
    extra["components"] = r.lbs.component_count;
  } else {
    throw ConfigError("unknown check '" + name +
                      "' (expected stabilization-invariance, split-inclusion, product-structure, independence, prop7)");
  }
  Json j{{"config", cfg}, {"report", to_json(rep)}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  dump(c, "verify_" + name + ".json", j);
  std::printf("%s: %s\n", name.c_str(), rep.pass ? "PASS" : (rep.inconclusive ? "INCONCLUSIVE" : "FAIL"));
  for (const auto& n : rep.notes) std::printf("  %s\n", n.c_str());
  return rep.pass ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large bifurcation supports of planar vector field families"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Overrides o;
  auto* portrait = app.add_subcommand("portrait", "phase portrait at one parameter value");
  auto* lbs = app.add_subcommand("lbs", "large bifurcation support at eps = 0");
  auto* diagram = app.add_subcommand("diagram", "bifurcation diagram on the configured parameter box");
  auto* verify = app.add_subcommand("verify", "run one structural check");
  for (auto* s : {portrait, lbs, diagram, verify}) add_common(s, o);
  verify->add_option("--check", o.check,
                     "stabilization-invariance | split-inclusion | product-structure | independence | prop7");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }
  try {
    const RunConfig c = resolve(o);
    if (*portrait) return run_portrait(c);
    if (*lbs) return run_lbs(c);
    if (*diagram) return run_diagram(c);
    return run_verify(c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
}

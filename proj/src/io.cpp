#include "lbs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lbs {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

void require_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) bad(where + ": missing '" + key + "'");
  if (!j[key].is_number()) bad(where + "." + key + ": expected a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) bad(where + "." + key + ": not finite");
  return v;
}

int get_int(const Json& j, const std::string& key, const std::string& where) {
  if (!j[key].is_number_integer()) bad(where + "." + key + ": expected an integer");
  return j[key].get<int>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& where) {
  if (!j[key].is_string()) bad(where + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

std::vector<double> get_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) bad(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Vec2 get_vec(const Json& j, const std::string& where) {
  const auto v = get_numbers(j, where);
  if (v.size() != 2) bad(where + ": expected [x, y]");
  return {v[0], v[1]};
}

Json vec(const Vec2& p) { return Json::array({p.x, p.y}); }

Json polyline(const Polyline& pl) {
  Json a = Json::array();
  for (const auto& p : pl) a.push_back(vec(p));
  return a;
}

std::string boundary_name(BoundaryBehavior b) {
  switch (b) {
    case BoundaryBehavior::outflow: return "outflow";
    case BoundaryBehavior::inflow: return "inflow";
    case BoundaryBehavior::invariant: return "invariant";
    case BoundaryBehavior::unspecified: return "unspecified";
  }
  return "unspecified";
}

BoundaryBehavior boundary_from(const std::string& s) {
  for (auto b : {BoundaryBehavior::outflow, BoundaryBehavior::inflow, BoundaryBehavior::invariant,
                 BoundaryBehavior::unspecified}) {
    if (boundary_name(b) == s) return b;
  }
  bad("unknown boundary behaviour '" + s + "'");
}

Json cut_to_json(const CutSpec& s) {
  return Json{{"core", region_to_json(s.core)}, {"support", region_to_json(s.support)}, {"order", s.order}};
}

CutSpec cut_from_json(const Json& j, const std::string& where) {
  require_keys(j, where, {"core", "support", "order"});
  if (!j.contains("core") || !j.contains("support")) bad(where + ": needs core and support");
  CutSpec s{region_from_json(j["core"]), region_from_json(j["support"]), 0};
  if (j.contains("order")) {
    s.order = get_int(j, "order", where);
    if (s.order != 0 && s.order < 2) bad(where + ".order: must be 0 (default) or at least 2");
  }
  return s;
}

Section section_from_json(const Json& j, const std::string& where) {
  require_keys(j, where, {"base", "direction", "half_length", "orientation"});
  Section s;
  s.base = get_vec(j.at("base"), where + ".base");
  if (j.contains("direction")) s.direction = get_vec(j["direction"], where + ".direction");
  const double n = norm(s.direction);
  if (n == 0.0) bad(where + ".direction: zero vector");
  s.direction = (1.0 / n) * s.direction;
  s.half_length = get_number(j, "half_length", where);
  if (j.contains("orientation")) s.orientation = get_int(j, "orientation", where) >= 0 ? 1 : -1;
  return s;
}

ConnectionProbe probe_from_json(const Json& j, const std::string& where) {
  require_keys(j, where, {"id", "unstable_saddle", "unstable_hint", "stable_saddle", "stable_hint", "crossing"});
  ConnectionProbe p;
  if (j.contains("id")) p.id = get_string(j, "id", where);
  for (const char* k : {"unstable_saddle", "unstable_hint", "stable_saddle", "stable_hint", "crossing"}) {
    if (!j.contains(k)) bad(where + ": missing '" + k + "'");
  }
  p.unstable_saddle = get_vec(j["unstable_saddle"], where + ".unstable_saddle");
  p.unstable_hint = get_vec(j["unstable_hint"], where + ".unstable_hint");
  p.stable_saddle = get_vec(j["stable_saddle"], where + ".stable_saddle");
  p.stable_hint = get_vec(j["stable_hint"], where + ".stable_hint");
  p.crossing = section_from_json(j["crossing"], where + ".crossing");
  return p;
}

// c * x^a * y^b * prod eps_k^e_k
struct Term {
  double c;
  int a, b;
  std::vector<int> e;
};

std::vector<Term> terms_from_json(const Json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of terms");
  std::vector<Term> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const Json& t = j[i];
    require_keys(t, w, {"c", "x", "y", "eps"});
    Term term{get_number(t, "c", w), 0, 0, std::vector<int>(dim, 0)};
    if (t.contains("x")) term.a = get_int(t, "x", w);
    if (t.contains("y")) term.b = get_int(t, "y", w);
    if (t.contains("eps")) {
      if (!t["eps"].is_array() || t["eps"].size() > dim) bad(w + ".eps: at most base_dim integer exponents");
      for (std::size_t k = 0; k < t["eps"].size(); ++k) {
        if (!t["eps"][k].is_number_integer()) bad(w + ".eps: expected integers");
        term.e[k] = t["eps"][k].get<int>();
      }
    }
    if (term.a < 0 || term.b < 0 || std::any_of(term.e.begin(), term.e.end(), [](int e) { return e < 0; })) {
      bad(w + ": negative exponent");
    }
    out.push_back(std::move(term));
  }
  return out;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double term_coef(const Term& t, std::span<const double> eps) {
  double c = t.c;
  for (std::size_t k = 0; k < t.e.size(); ++k) c *= ipow(eps[k], t.e[k]);
  return c;
}

double poly(const std::vector<Term>& ts, std::span<const double> eps, const Vec2& p) {
  double s = 0.0;
  for (const auto& t : ts) s += term_coef(t, eps) * ipow(p.x, t.a) * ipow(p.y, t.b);
  return s;
}

Vec2 poly_grad(const std::vector<Term>& ts, std::span<const double> eps, const Vec2& p) {
  Vec2 g;
  for (const auto& t : ts) {
    const double c = term_coef(t, eps);
    if (t.a > 0) g.x += c * t.a * ipow(p.x, t.a - 1) * ipow(p.y, t.b);
    if (t.b > 0) g.y += c * t.b * ipow(p.x, t.a) * ipow(p.y, t.b - 1);
  }
  return g;
}

FieldFamily polynomial_family(const Json& j) {
  const std::string w = "family.polynomial";
  require_keys(j, w, {"name", "base_dim", "base_radius", "domain", "boundary", "fx", "fy", "sections", "probes"});
  FamilySpec spec;
  spec.name = j.contains("name") ? get_string(j, "name", w) : "polynomial";
  if (!j.contains("base_dim")) bad(w + ": missing 'base_dim'");
  const int dim = get_int(j, "base_dim", w);
  if (dim < 1 || dim > 4) bad(w + ".base_dim: must be between 1 and 4");
  spec.base_dim = static_cast<std::size_t>(dim);
  if (j.contains("base_radius")) spec.base_radius = get_number(j, "base_radius", w);
  if (!j.contains("domain")) bad(w + ": missing 'domain'");
  ChartDomain d{"domain", region_from_json(j["domain"]), BoundaryBehavior::unspecified};
  if (j.contains("boundary")) d.boundary = boundary_from(get_string(j, "boundary", w));
  spec.domains = {d};
  if (!j.contains("fx") || !j.contains("fy")) bad(w + ": needs fx and fy");
  const auto fx = terms_from_json(j["fx"], spec.base_dim, w + ".fx");
  const auto fy = terms_from_json(j["fy"], spec.base_dim, w + ".fy");
  spec.eval = [fx, fy](std::span<const double> eps, const Vec2& p) { return Vec2{poly(fx, eps, p), poly(fy, eps, p)}; };
  spec.jacobian = [fx, fy](std::span<const double> eps, const Vec2& p) {
    const Vec2 gx = poly_grad(fx, eps, p), gy = poly_grad(fy, eps, p);
    return Mat2{gx.x, gx.y, gy.x, gy.y};
  };
  if (j.contains("sections")) {
    if (!j["sections"].is_array()) bad(w + ".sections: expected an array");
    for (std::size_t i = 0; i < j["sections"].size(); ++i) {
      spec.sections.push_back(section_from_json(j["sections"][i], w + ".sections[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("probes")) {
    if (!j["probes"].is_array()) bad(w + ".probes: expected an array");
    for (std::size_t i = 0; i < j["probes"].size(); ++i) {
      spec.probes.push_back(probe_from_json(j["probes"][i], w + ".probes[" + std::to_string(i) + "]"));
    }
  }
  return FieldFamily(std::move(spec));
}

Json point_json(const SingularPoint& sp) {
  Json ev = Json::array();
  for (const auto& l : sp.eigenvalues) ev.push_back(Json::array({l.real(), l.imag()}));
  Json j{{"id", sp.id},
         {"location", vec(sp.location)},
         {"eigenvalues", ev},
         {"class", to_string(sp.cls)},
         {"hyperbolic", sp.hyperbolic},
         {"borderline", sp.borderline}};
  if (sp.lyapunov1) j["lyapunov1"] = *sp.lyapunov1;
  if (sp.sn_coefficient) j["sn_coefficient"] = *sp.sn_coefficient;
  return j;
}

Json label_json(const LimitSetLabel& l) {
  return Json{{"kind", to_string(l.kind)}, {"target", l.target_id}, {"interesting", l.interesting}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Regions and config

Json region_to_json(const Region& r) {
  if (r.is_annulus()) {
    const auto& a = r.as_annulus();
    return Json{{"annulus", Json::array({a.r_min, a.r_max})}, {"center", vec(a.center)}};
  }
  const auto& b = r.as_rect();
  return Json{{"rect", Json::array({b.x_min, b.x_max, b.y_min, b.y_max})}};
}

Region region_from_json(const Json& j) {
  require_keys(j, "region", {"annulus", "center", "rect"});
  try {
    if (j.contains("annulus")) {
      if (j.contains("rect")) bad("region: give either annulus or rect");
      const auto r = get_numbers(j["annulus"], "region.annulus");
      if (r.size() != 2) bad("region.annulus: expected [r_min, r_max]");
      const Vec2 c = j.contains("center") ? get_vec(j["center"], "region.center") : Vec2{};
      return Region::annulus(r[0], r[1], c);
    }
    if (j.contains("rect")) {
      if (j.contains("center")) bad("region: center only applies to annuli");
      const auto r = get_numbers(j["rect"], "region.rect");
      if (r.size() != 4) bad("region.rect: expected [x_min, x_max, y_min, y_max]");
      return Region::rect(r[0], r[1], r[2], r[3]);
    }
  } catch (const std::invalid_argument& e) {  // RegionError and geometry checks
    bad(std::string("region: ") + e.what());
  }
  bad("region: needs annulus or rect");
}

Json config_to_json(const RunConfig& c) {
  Json regions = Json::array();
  for (const auto& r : c.regions) regions.push_back(region_to_json(r));
  return Json{{"schema_version", c.schema_version},
              {"family", c.family},
              {"transform", c.transform},
              {"epsilon", c.epsilon},
              {"numerics",
               {{"tol", c.tol},
                {"h", c.h},
                {"h_eps", c.h_eps},
                {"half_width", c.half_width},
                {"hyperbolicity_floor", c.hyperbolicity_floor},
                {"tangency_floor", c.tangency_floor},
                {"seeds_per_axis", c.seeds_per_axis}}},
              {"regions", regions},
              {"phi", cut_to_json(c.phi)},
              {"phi1", cut_to_json(c.phi1)},
              {"phi2", cut_to_json(c.phi2)},
              {"split_index", c.split_index},
              {"check", c.check},
              {"out", c.out}};
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  require_keys(j, "config", {"schema_version", "family", "transform", "epsilon", "numerics", "regions", "phi", "phi1",
                             "phi2", "split_index", "check", "out"});
  if (!j.contains("schema_version")) bad("config: missing 'schema_version'");
  c.schema_version = get_int(j, "schema_version", "config");
  if (c.schema_version != kConfigSchemaVersion) {
    bad("config: schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
        std::to_string(kConfigSchemaVersion) + ")");
  }
  if (j.contains("family")) {
    const Json& f = j["family"];
    require_keys(f, "family", {"builtin", "polynomial", "file"});
    if (f.size() != 1) bad("family: give exactly one of builtin, polynomial, file");
    c.family = f;
  }
  if (j.contains("transform")) {
    c.transform = get_string(j, "transform", "config");
    if (c.transform != "none" && c.transform != "stabilize" && c.transform != "split") {
      bad("config.transform: expected none, stabilize or split");
    }
  }
  if (j.contains("epsilon")) c.epsilon = get_numbers(j["epsilon"], "config.epsilon");
  if (j.contains("numerics")) {
    const Json& n = j["numerics"];
    const std::string w = "numerics";
    require_keys(n, w, {"tol", "h", "h_eps", "half_width", "hyperbolicity_floor", "tangency_floor", "seeds_per_axis"});
    if (n.contains("tol")) c.tol = get_number(n, "tol", w);
    if (n.contains("h")) c.h = get_number(n, "h", w);
    if (n.contains("h_eps")) c.h_eps = get_number(n, "h_eps", w);
    if (n.contains("half_width")) c.half_width = get_number(n, "half_width", w);
    if (n.contains("hyperbolicity_floor")) c.hyperbolicity_floor = get_number(n, "hyperbolicity_floor", w);
    if (n.contains("tangency_floor")) c.tangency_floor = get_number(n, "tangency_floor", w);
    if (n.contains("seeds_per_axis")) c.seeds_per_axis = get_int(n, "seeds_per_axis", w);
    for (double v : {c.tol, c.h, c.h_eps, c.half_width, c.hyperbolicity_floor, c.tangency_floor}) {
      if (!(v > 0.0)) bad("numerics: values must be positive");
    }
    if (c.seeds_per_axis < 8) bad("numerics.seeds_per_axis: must be at least 8");
  }
  if (j.contains("regions")) {
    if (!j["regions"].is_array()) bad("config.regions: expected an array");
    c.regions.clear();
    for (const auto& r : j["regions"]) c.regions.push_back(region_from_json(r));
  }
  if (j.contains("phi")) c.phi = cut_from_json(j["phi"], "phi");
  if (j.contains("phi1")) c.phi1 = cut_from_json(j["phi1"], "phi1");
  if (j.contains("phi2")) c.phi2 = cut_from_json(j["phi2"], "phi2");
  if (j.contains("split_index")) {
    const int k = get_int(j, "split_index", "config");
    if (k < 1) bad("config.split_index: must be at least 1");
    c.split_index = static_cast<std::size_t>(k);
  }
  if (j.contains("check")) c.check = get_string(j, "check", "config");
  if (j.contains("out")) c.out = get_string(j, "out", "config");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

FieldFamily family_from_source(const Json& source) {
  if (source.contains("builtin")) {
    const std::string name = get_string(source, "builtin", "family");
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) bad("family: unknown builtin '" + name + "'");
    return builtin_family(name);
  }
  if (source.contains("polynomial")) return polynomial_family(source["polynomial"]);
  if (source.contains("file")) {
    const std::string path = get_string(source, "file", "family");
    std::ifstream in(path);
    if (!in) bad("family: cannot open '" + path + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      bad("family file '" + path + "' is not valid JSON: " + e.what());
    }
    require_keys(j, "family file", {"builtin", "polynomial"});
    return family_from_source(j);
  }
  bad("family: needs builtin, polynomial or file");
}

FieldFamily base_family(const RunConfig& c) { return family_from_source(c.family); }

CutFunction make_cut(const CutSpec& s, const FieldFamily& family) {
  const int order = s.order > 0 ? s.order : default_cut_order(family.smoothness());
  return make_bump(s.core, s.support, order);
}

SplittingData splitting_data(const RunConfig& c) {
  const FieldFamily v = base_family(c);
  return SplittingData{v, c.split_index, make_cut(c.phi1, v), make_cut(c.phi2, v)};
}

FieldFamily build_family(const RunConfig& c) {
  if (c.transform == "stabilize") {
    const FieldFamily v = base_family(c);
    return stabilize(v, make_cut(c.phi, v));
  }
  if (c.transform == "split") return split_family(splitting_data(c));
  return base_family(c);
}

ParamPoint resolved_epsilon(const RunConfig& c, const FieldFamily& family) {
  if (c.epsilon.empty()) return ParamPoint::zero(family.base_dim());
  if (c.epsilon.size() != family.base_dim()) {
    bad("epsilon has " + std::to_string(c.epsilon.size()) + " coordinates, the family has " +
        std::to_string(family.base_dim()));
  }
  return ParamPoint(c.epsilon);
}

PortraitOptions portrait_options(const RunConfig& c) {
  PortraitOptions o;
  o.seeds_per_axis = c.seeds_per_axis;
  o.tol = c.tol;
  o.cycles.tol = c.tol;
  o.cycles.floor = c.hyperbolicity_floor;
  o.cycles.fixed.tangency_floor = c.tangency_floor;
  return o;
}

DiagramOptions diagram_options(const RunConfig& c) {
  DiagramOptions o;
  o.seeds_per_axis = c.seeds_per_axis;
  // a decade coarser than the portrait tolerance (hundreds of nodes per scan)
  o.cycles.tol = 10.0 * c.tol;
  o.cycles.floor = c.hyperbolicity_floor;
  o.cycles.fixed.tangency_floor = c.tangency_floor;
  o.tangency_floor = c.tangency_floor;
  o.probe_tol = c.tol;
  return o;
}

LbsOptions lbs_options(const RunConfig& c) {
  LbsOptions o;
  o.elbs.portrait = portrait_options(c);
  o.sweep.portrait = portrait_options(c);
  return o;
}

// ---------------------------------------------------------------------------
// JSON artifacts

Json to_json(const PhasePortrait& pp) {
  Json pts = Json::array(), cycles = Json::array(), seps = Json::array(), na = Json::array();
  for (const auto& sp : pp.singular_points) pts.push_back(point_json(sp));
  for (const auto& c : pp.cycles) {
    cycles.push_back(Json{{"id", c.id},
                          {"section", c.section_index},
                          {"s", c.s},
                          {"period", c.period},
                          {"multiplier", c.multiplier},
                          {"multiplier_uncertainty", c.multiplier_uncertainty},
                          {"multiplicity", c.multiplicity},
                          {"stability", to_string(c.stability)},
                          {"nest", c.nest_id},
                          {"interesting", c.interesting},
                          {"polyline", polyline(c.polyline)}});
  }
  for (const auto& s : pp.separatrices) {
    seps.push_back(Json{{"id", s.id},
                        {"owner", s.owner},
                        {"stable", s.stable},
                        {"side", s.side},
                        {"center_branch", s.center_branch},
                        {"alpha", label_json(s.alpha)},
                        {"omega", label_json(s.omega)},
                        {"polyline", polyline(s.polyline)}});
  }
  for (const auto& e : detect_non_andronov(pp)) na.push_back(Json{{"kind", to_string(e.kind)}, {"refs", e.refs}});
  return Json{{"eps", pp.eps.coords},
              {"boundary", boundary_name(pp.boundary)},
              {"singular_points", pts},
              {"cycles", cycles},
              {"separatrices", seps},
              {"nests", pp.nests},
              {"non_andronov", na},
              {"continuum_suspected", pp.continuum_suspected},
              {"unresolved", pp.unresolved()},
              {"diagnostics", pp.diagnostics}};
}

Json to_json(const SupportSet& s) {
  Json pts = Json::array(), prov = Json::array();
  for (const auto& p : s.points) {
    pts.push_back(vec(p.p));
    prov.push_back(to_string(p.tag));
  }
  return Json{{"points", pts},
              {"provenance", prov},
              {"components", s.component},
              {"component_count", s.component_count},
              {"h", s.h},
              {"diagnostics", s.diagnostics}};
}

Json to_json(const CheckReport& r) {
  return Json{{"check", r.check},
              {"result", r.pass ? "PASS" : (r.inconclusive ? "INCONCLUSIVE" : "FAIL")},
              {"pass", r.pass},
              {"inconclusive", r.inconclusive},
              {"metric", r.metric},
              {"notes", r.notes}};
}

namespace {

Json label_to_json(const DegeneracyLabel& l) {
  return Json{{"class", to_string(l.cls)}, {"location", vec(l.location)}, {"discriminant", l.discriminant},
              {"where", l.where.coords},   {"region", l.region},          {"tangency", l.tangency},
              {"detail", l.detail}};
}

}  // namespace

Json to_json(const BifurcationDiagram& bd) {
  Json cells = Json::array(), curves = Json::array();
  for (std::size_t i = 0; i < bd.cells.size(); ++i) {
    const auto& c = bd.cells[i];
    if (c.labels.empty() && !c.failed) continue;
    Json labels = Json::array();
    for (const auto& l : c.labels) labels.push_back(label_to_json(l));
    cells.push_back(Json{{"cell", i}, {"index", c.index}, {"failed", c.failed}, {"labels", labels}});
  }
  for (const auto& cv : bd.curves) {
    Json path = Json::array();
    for (const auto& p : cv.path) path.push_back(p.coords);
    curves.push_back(Json{{"class", to_string(cv.cls)},
                          {"region", cv.region},
                          {"cells", cv.cells},
                          {"path", path},
                          {"estimate", cv.estimate.coords}});
  }
  return Json{{"grid", {{"lo", bd.grid.lo}, {"hi", bd.grid.hi}, {"step", bd.grid.step}}},
              {"axes", bd.axes},
              {"shape", bd.shape},
              {"region_count", bd.region_count},
              {"cells", cells},
              {"curves", curves},
              {"diagnostics", bd.diagnostics}};
}

void write_diagram_csv(std::ostream& os, const BifurcationDiagram& bd, const Json& config) {
  os << "# config: " << config.dump() << "\n";
  os << "eps_1,eps_2,class,location_x,location_y,region,tangency,cell\n";
  char buf[256];
  for (std::size_t i = 0; i < bd.cells.size(); ++i) {
    for (const auto& l : bd.cells[i].labels) {
      const double e1 = l.where.size() > 0 ? l.where[0] : 0.0;
      const std::string e2 = l.where.size() > 1 ? [&] {
        char b[32];
        std::snprintf(b, sizeof b, "%.9g", l.where[1]);
        return std::string(b);
      }()
                                                : std::string();
      std::snprintf(buf, sizeof buf, "%.9g,%s,%s,%.9g,%.9g,%d,%d,%zu\n", e1, e2.c_str(), to_string(l.cls).c_str(),
                    l.location.x, l.location.y, l.region, l.tangency ? 1 : 0, i);
      os << buf;
    }
  }
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Canvas {
  Rect b;
  double size = 600.0;
  double pad = 20.0;
  std::ostringstream out;

  Canvas(Rect box, const Json& config) : b(box) {
    // square aspect
    const double w = b.x_max - b.x_min, h = b.y_max - b.y_min, m = std::max(w, h);
    const double cx = 0.5 * (b.x_min + b.x_max), cy = 0.5 * (b.y_min + b.y_max);
    b = {cx - m / 2, cx + m / 2, cy - m / 2, cy + m / 2};
    std::string meta = config.dump();
    for (std::size_t pos; (pos = meta.find("]]>")) != std::string::npos;) meta.replace(pos, 3, "]] >");
    char head[256];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  size + 2 * pad, size + 2 * pad, size + 2 * pad, size + 2 * pad);
    out << head << "<metadata><![CDATA[" << meta << "]]></metadata>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  double X(double x) const { return pad + (x - b.x_min) / (b.x_max - b.x_min) * size; }
  double Y(double y) const { return pad + (b.y_max - y) / (b.y_max - b.y_min) * size; }

  void line(const Polyline& pl, const char* color, double width, bool closed = false) {
    if (pl.size() < 2) return;
    out << (closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
        << "\" points=\"";
    char buf[48];
    for (const auto& p : pl) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p.x), Y(p.y));
      out << buf;
    }
    out << "\"/>\n";
  }
  void dot(const Vec2& p, double r, const char* color, double opacity = 1.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\" fill-opacity=\"%.2f\"/>\n",
                  X(p.x), Y(p.y), r, color, opacity);
    out << buf;
  }
  void text(double x, double y, const std::string& s, int size_px = 12) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"%d\" font-family=\"monospace\">", x, y,
                  size_px);
    out << buf;
    for (char ch : s) {
      if (ch == '<') out << "&lt;";
      else if (ch == '>') out << "&gt;";
      else if (ch == '&') out << "&amp;";
      else out << ch;
    }
    out << "</text>\n";
  }
  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

const char* point_color(PointClass c) {
  switch (c) {
    case PointClass::hyperbolic_saddle: return "#d62728";
    case PointClass::hyperbolic_node: return "#1f77b4";
    case PointClass::hyperbolic_focus: return "#17becf";
    case PointClass::saddle_node: return "#ff7f0e";
    case PointClass::andronov_hopf: return "#9467bd";
    case PointClass::degenerate_other: return "#7f7f7f";
  }
  return "black";
}

void draw_domain(Canvas& cv, const Region& r) {
  if (r.is_annulus()) {
    const auto& a = r.as_annulus();
    for (double rad : {a.r_min, a.r_max}) {
      if (rad <= 0.0) continue;
      Polyline c;
      for (int k = 0; k <= 180; ++k) {
        const double t = 2.0 * M_PI * k / 180.0;
        c.push_back(a.center + Vec2{rad * std::cos(t), rad * std::sin(t)});
      }
      cv.line(c, "#bbbbbb", 1.0, true);
    }
    return;
  }
  const auto& b = r.as_rect();
  cv.line({{b.x_min, b.y_min}, {b.x_max, b.y_min}, {b.x_max, b.y_max}, {b.x_min, b.y_max}}, "#bbbbbb", 1.0, true);
}

void draw_skeleton(Canvas& cv, const PhasePortrait& pp, double opacity_scale) {
  const char* sep_stable = opacity_scale < 1.0 ? "#c6dbef" : "#6baed6";
  const char* sep_unstable = opacity_scale < 1.0 ? "#fcbba1" : "#fb6a4a";
  for (const auto& s : pp.separatrices) cv.line(s.polyline, s.stable ? sep_stable : sep_unstable, 1.0);
  for (const auto& c : pp.cycles) {
    const char* col = c.stability == CycleStability::attracting   ? "#2ca02c"
                      : c.stability == CycleStability::repelling ? "#d62728"
                                                                  : "#ff7f0e";
    cv.line(c.polyline, col, opacity_scale < 1.0 ? 1.0 : 2.0, true);
  }
  for (const auto& sp : pp.singular_points) cv.dot(sp.location, 4.0, point_color(sp.cls), opacity_scale);
}

const char* palette(int k) {
  static const char* p[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999"};
  return p[static_cast<std::size_t>(k < 0 ? 7 : k % 8)];
}

}  // namespace

std::string skeleton_svg(const PhasePortrait& pp, const FieldFamily& family, const Json& config) {
  Canvas cv(family.domain().region.bounds(), config);
  draw_domain(cv, family.domain().region);
  draw_skeleton(cv, pp, 1.0);
  return cv.finish();
}

std::string support_svg(const SupportSet& s, const PhasePortrait& pp, const FieldFamily& family, const Json& config) {
  Canvas cv(family.domain().region.bounds(), config);
  draw_domain(cv, family.domain().region);
  draw_skeleton(cv, pp, 0.5);
  const double r = std::max(1.5, 0.5 * s.h / (cv.b.x_max - cv.b.x_min) * cv.size);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    cv.dot(s.points[i].p, r, palette(i < s.component.size() ? s.component[i] : -1), 0.8);
  }
  cv.text(cv.pad, cv.pad - 6, "components: " + std::to_string(s.component_count));
  return cv.finish();
}

std::string diagram_svg(const BifurcationDiagram& bd, const Json& config) {
  const auto& ax = bd.axes;
  const bool two = ax.size() >= 2;
  const double x0 = bd.grid.lo[ax.at(0)], x1 = bd.grid.hi[ax[0]];
  const double y0 = two ? bd.grid.lo[ax[1]] : -0.5 * (x1 - x0), y1 = two ? bd.grid.hi[ax[1]] : 0.5 * (x1 - x0);
  Canvas cv(Rect{x0, x1, y0, y1}, config);
  cv.line({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, "#888888", 1.0, true);
  if (!two) cv.line({{x0, 0.0}, {x1, 0.0}}, "#888888", 1.0);
  const double step = bd.grid.step;
  char buf[256];
  for (std::size_t i = 0; i < bd.cells.size(); ++i) {
    const auto& c = bd.cells[i];
    if (c.labels.empty() && !c.failed) continue;
    const double cx = bd.grid.value(ax[0], c.index[0]);
    const double cy = two ? bd.grid.value(ax[1], c.index[1]) : -0.5 * step;
    const char* col = c.failed ? "#000000" : palette(static_cast<int>(c.labels.front().cls));
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" fill-opacity=\"0.45\"/>\n",
                  cv.X(cx), cv.Y(cy + step), cv.X(cx + step) - cv.X(cx), cv.Y(cy) - cv.Y(cy + step), col);
    cv.out << buf;
  }
  for (const auto& curve : bd.curves) {
    Polyline pl;
    for (const auto& p : curve.path) pl.push_back({p[ax[0]], two ? p[ax[1]] : 0.0});
    if (pl.size() == 1) {
      cv.dot(pl[0], 3.0, palette(static_cast<int>(curve.cls)));
    } else {
      for (const auto& p : pl) cv.dot(p, 1.5, palette(static_cast<int>(curve.cls)));
    }
  }
  std::string legend;
  std::set<std::string> seen;
  for (const auto& curve : bd.curves) {
    const std::string n = to_string(curve.cls);
    if (seen.insert(n).second) legend += n + " ";
  }
  cv.text(cv.pad, cv.pad - 6, "eps_" + std::to_string(ax[0] + 1) + (two ? " / eps_" + std::to_string(ax[1] + 1) : "") +
                                  "  " + legend);
  return cv.finish();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace lbs

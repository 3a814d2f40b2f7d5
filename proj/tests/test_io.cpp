#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lbs/io.hpp"

using namespace lbs;

namespace {

Json minimal() { return Json{{"schema_version", 1}}; }

RunConfig modified(const char* key, Json value) {
  Json j = minimal();
  j[key] = std::move(value);
  return config_from_json(j);
}

// x' = (a + eps) x - y, y' = x + (a + eps) y: a focus with real part a + eps at the origin
Json focus_family(double a) {
  return Json{{"polynomial",
               {{"name", "focus"},
                {"base_dim", 1},
                {"domain", {{"rect", {-1, 1, -1, 1}}}},
                {"boundary", "outflow"},
                {"fx", Json::array({{{"c", a}, {"x", 1}}, {{"c", -1.0}, {"y", 1}}, {{"c", 1.0}, {"x", 1}, {"eps", {1}}}})},
                {"fy", Json::array({{{"c", 1.0}, {"x", 1}}, {{"c", a}, {"y", 1}}, {{"c", 1.0}, {"y", 1}, {"eps", {1}}}})}}}};
}

}  // namespace

TEST_CASE("config defaults round trip") {
  const RunConfig c = config_from_json(minimal());
  const Json j = config_to_json(c);
  CHECK(j["schema_version"] == kConfigSchemaVersion);
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(j["family"]["builtin"] == "two_parabolic_cycles");
  CHECK(j["numerics"]["h"] == 0.01);
}

TEST_CASE("config with every field round trips") {
  Json j = config_to_json(RunConfig{});
  j["family"] = Json{{"builtin", "PC"}};
  j["transform"] = "stabilize";
  j["epsilon"] = {0.01};
  j["numerics"]["tol"] = 1e-8;
  j["regions"] = Json::array({region_to_json(Region::rect(-1, 1, -0.5, 0.5))});
  j["phi"] = Json{{"core", region_to_json(Region::disk(0.5))}, {"support", region_to_json(Region::disk(0.9))}, {"order", 4}};
  j["check"] = "prop7";
  const RunConfig c = config_from_json(j);
  CHECK(c.transform == "stabilize");
  CHECK(c.tol == 1e-8);
  CHECK(c.phi.order == 4);
  CHECK_FALSE(c.regions[0].is_annulus());
  CHECK(config_to_json(c) == j);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(config_from_json(Json::array()), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::object()), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"schema_version", 2}}), ConfigError);
  CHECK_THROWS_AS(modified("unknown", 1), ConfigError);
  CHECK_THROWS_AS(modified("transform", "rotate"), ConfigError);
  CHECK_THROWS_AS(modified("epsilon", "zero"), ConfigError);
  CHECK_THROWS_AS(modified("numerics", Json{{"h", -1.0}}), ConfigError);
  CHECK_THROWS_AS(modified("numerics", Json{{"h", "small"}}), ConfigError);
  CHECK_THROWS_AS(modified("family", Json{{"builtin", "AH"}, {"file", "x.json"}}), ConfigError);
  CHECK_THROWS_AS(modified("regions", Json::array({Json{{"annulus", {2.0, 1.0}}}})), ConfigError);
  CHECK_THROWS_AS(modified("phi", Json{{"core", region_to_json(Region::disk(0.5))}}), ConfigError);
  CHECK_THROWS_AS(family_from_source(Json{{"builtin", "no_such_model"}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("region json") {
  const Region a = Region::annulus(0.6, 1.4, {0.5, 0.0});
  const Region b = region_from_json(region_to_json(a));
  REQUIRE(b.is_annulus());
  CHECK(b.as_annulus().r_min == 0.6);
  CHECK(b.as_annulus().center.x == 0.5);
  const Region r = region_from_json(Json{{"rect", {0, 1, 2, 3}}});
  CHECK(r.as_rect().y_max == 3.0);
  CHECK_THROWS_AS(region_from_json(Json{{"rect", {0, 1}}}), ConfigError);
}

TEST_CASE("polynomial family evaluation and jacobian") {
  const FieldFamily f = family_from_source(focus_family(-0.5));
  CHECK(f.base_dim() == 1);
  CHECK(f.domain().boundary == BoundaryBehavior::outflow);
  const ParamPoint e{0.2};
  const Vec2 p{0.3, -0.4};
  const Vec2 v = f.eval(e, p);
  CHECK(v.x == doctest::Approx(-0.5 * 0.3 + 0.4 + 0.2 * 0.3));
  CHECK(v.y == doctest::Approx(0.3 + 0.2 - 0.2 * 0.4));
  const Mat2 j = f.jacobian(e, p), fd = f.jacobian_fd(e, p);
  CHECK(j.a == doctest::Approx(fd.a));
  CHECK(j.b == doctest::Approx(fd.b));
  CHECK(j.c == doctest::Approx(fd.c));
  CHECK(j.d == doctest::Approx(fd.d));
  // the focus changes stability at eps = 0.5
  const auto sp = classify_singular_point(f, ParamPoint{0.5}, {0, 0});
  CHECK(std::abs(sp.eigenvalues[0].real()) < 1e-12);
}

TEST_CASE("build family applies the transform") {
  RunConfig c;
  c.transform = "split";
  const FieldFamily w = build_family(c);
  CHECK(w.name() == "split(two_parabolic_cycles)");
  c.transform = "stabilize";
  CHECK(build_family(c).name() == "stab(two_parabolic_cycles)");
  c.epsilon = {0.1};
  CHECK_THROWS_AS(resolved_epsilon(c, w), ConfigError);
}

TEST_CASE("portrait json and svg") {
  const FieldFamily f = model_two_parabolic_cycles();
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0, 0.0});
  const Json j = to_json(pp);
  CHECK(j["singular_points"].size() == 1);
  CHECK(j["cycles"].size() == 2);
  CHECK(j["unresolved"] == false);
  CHECK(j.dump() == to_json(pp).dump());
  const Json cfg = config_to_json(RunConfig{});
  const std::string svg = skeleton_svg(pp, f, cfg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(cfg.dump()) != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("support set json") {
  SupportSet s;
  s.h = 0.02;
  s.points = {{{0, 0}, Provenance::per}, {{1, 1}, Provenance::sep}};
  s.recompute_components();
  const Json j = to_json(s);
  for (const char* k : {"points", "provenance", "components", "h"}) CHECK(j.contains(k));
  CHECK(j["provenance"][1] == "sep");
  CHECK(j["components"].size() == 2);
  CHECK(j["h"] == 0.02);
}

TEST_CASE("diagram csv embeds the config") {
  const auto bd = scan_diagram(model_basic(BasicKind::SN), GridSpec::box(1, 0.05, 0.005));
  const Json cfg = config_to_json(RunConfig{});
  std::ostringstream os;
  write_diagram_csv(os, bd, cfg);
  std::istringstream in(os.str());
  std::string first, header, row;
  std::getline(in, first);
  std::getline(in, header);
  std::getline(in, row);
  CHECK(first == "# config: " + cfg.dump());
  CHECK(header.rfind("eps_1,eps_2,class,location_x,location_y", 0) == 0);
  CHECK(row.find(",SN,") != std::string::npos);
  const Json dj = to_json(bd);
  CHECK(dj["curves"].size() == 1);
  CHECK(dj["curves"][0]["class"] == "SN");
  CHECK(diagram_svg(bd, cfg).find("SN") != std::string::npos);
}

TEST_CASE("check report json") {
  CheckReport r{"prop7", false, true, 0.0, {"x"}};
  CHECK(to_json(r)["result"] == "INCONCLUSIVE");
  r.pass = true;
  CHECK(to_json(r)["result"] == "PASS");
}

TEST_CASE("shipped polynomial example: Hopf normal form") {
  const RunConfig c = load_config(std::string(LBS_SOURCE_DIR) + "/configs/hopf_polynomial.json");
  const FieldFamily f = build_family(c);
  const ParamPoint e = resolved_epsilon(c, f);
  REQUIRE(e[0] == 0.04);
  const auto cycles = find_limit_cycles(f, e, f.sections());
  REQUIRE(cycles.size() == 1);
  // r' = r (eps - r^2): cycle at r = sqrt(eps), multiplier exp(-2 eps * 2 pi)
  CHECK(norm(cycles[0].polyline.front()) == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(cycles[0].multiplier == doctest::Approx(std::exp(-0.16 * 3.141592653589793)).epsilon(1e-7));
  for (const char* name : {"two_parabolic.json", "split.json", "stabilized.json"}) {
    const RunConfig k = load_config(std::string(LBS_SOURCE_DIR) + "/configs/" + name);
    CHECK(config_to_json(config_from_json(config_to_json(k))) == config_to_json(k));
    CHECK_NOTHROW(build_family(k));
  }
}

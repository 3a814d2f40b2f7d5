#include <cmath>

#include "doctest.h"
#include "lbs/portrait.hpp"

using namespace lbs;

namespace {

constexpr double kTwoPi = 6.283185307179586;

int count_kind(const std::vector<NonAndronovElement>& v, NonAndronovKind k) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [&](const auto& e) { return e.kind == k; }));
}

Polyline circle(double r, int n = 400) {
  Polyline p;
  for (int i = 0; i <= n; ++i) p.push_back({r * std::cos(kTwoPi * i / n), r * std::sin(kTwoPi * i / n)});
  return p;
}

}  // namespace

TEST_CASE("saddle-node point at eps = 0") {
  const FieldFamily f = model_basic(BasicKind::SN);
  const auto pts = find_singular_points(f, ParamPoint{0.0}, 16);
  REQUIRE(pts.size() == 1);
  CHECK(norm(pts[0].location) < 1e-8);
  CHECK(pts[0].cls == PointClass::saddle_node);
  CHECK(std::abs(pts[0].eigenvalues[0].real() + 1.0) < 1e-8);
  CHECK(std::abs(pts[0].eigenvalues[1].real()) < 1e-8);
  CHECK(pts[0].sn_coefficient.value() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(pts[0].hyperbolic);
}

TEST_CASE("saddle and node after the fold") {
  const FieldFamily f = model_basic(BasicKind::SN);
  const auto pts = find_singular_points(f, ParamPoint{-0.04}, 16);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].location.x == doctest::Approx(-0.2));
  CHECK(pts[0].cls == PointClass::hyperbolic_node);
  CHECK(pts[0].eigenvalues[1].real() == doctest::Approx(-0.4));
  CHECK(pts[0].attractor());
  CHECK(pts[1].location.x == doctest::Approx(0.2));
  CHECK(pts[1].cls == PointClass::hyperbolic_saddle);
  CHECK(pts[1].eigenvalues[1].real() == doctest::Approx(0.4));
  CHECK(pts[1].eigenvalues[0].real() == doctest::Approx(-1.0));
  CHECK(find_singular_points(f, ParamPoint{0.04}, 16).empty());
  CHECK_THROWS_AS(find_singular_points(f, ParamPoint{0.0}, 4), PreconditionError);
}

TEST_CASE("Andronov-Hopf point") {
  const FieldFamily f = model_basic(BasicKind::AH);
  const auto pts = find_singular_points(f, ParamPoint{0.0}, 16);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].cls == PointClass::andronov_hopf);
  // r' = -r^3; with <q, q> = 1 the complex coordinate has |z|^2 = r^2 / 2, so z' = i z - 2 z |z|^2.
  CHECK(pts[0].lyapunov1.value() == doctest::Approx(-2.0).epsilon(1e-4));
  const auto after = find_singular_points(f, ParamPoint{0.04}, 16);
  REQUIRE(after.size() == 1);
  CHECK(after[0].cls == PointClass::hyperbolic_focus);
  CHECK(after[0].repeller());
  CHECK_FALSE(after[0].lyapunov1.has_value());
}

TEST_CASE("Lyapunov value of a subcritical focus") {
  // r' = r (eps + r^2) in Cartesian form, by constructing a polynomial family.
  FamilySpec spec;
  spec.name = "sub";
  spec.domains = {ChartDomain{"d", Region::disk(1.0), BoundaryBehavior::unspecified}};
  spec.eval = [](std::span<const double>, const Vec2& p) {
    const double s = p.x * p.x + p.y * p.y;
    return Vec2{-p.y + p.x * s, p.x + p.y * s};
  };
  const FieldFamily f(spec);
  CHECK(first_lyapunov_value(f, ParamPoint{0.0}, {0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("two-parabolic portrait") {
  const FieldFamily f = model_two_parabolic_cycles();
  PortraitOptions o;
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0, 0.0}, o);
  REQUIRE(pp.singular_points.size() == 1);
  CHECK(pp.singular_points[0].cls == PointClass::hyperbolic_focus);
  CHECK(pp.singular_points[0].repeller());
  REQUIRE(pp.cycles.size() == 2);
  for (const auto& c : pp.cycles) {
    CHECK(c.multiplicity == 2);
    CHECK(c.stability == CycleStability::semi_stable_inner_attracting);
    CHECK(c.nest_id == 0);
    CHECK_FALSE(c.interesting);
    CHECK(distance(c.polyline.front(), c.polyline.back()) < 1e-4);
    CHECK(c.period == doctest::Approx(kTwoPi).epsilon(1e-6));
  }
  CHECK(norm(pp.cycles[0].polyline.front()) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(norm(pp.cycles[1].polyline.front()) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(pp.nests.size() == 1);
  CHECK(count_kind(detect_non_andronov(pp), NonAndronovKind::non_hyperbolic_limit_cycle) == 2);
  CHECK_FALSE(pp.unresolved());
}

TEST_CASE("hyperbolic cycles after the first fold") {
  const FieldFamily f = model_two_parabolic_cycles();
  const PhasePortrait pp = compute_portrait(f, ParamPoint{-0.01, 0.0});
  REQUIRE(pp.cycles.size() == 3);
  CHECK(norm(pp.cycles[0].polyline.front()) == doctest::Approx(std::sqrt(0.9)).epsilon(1e-6));
  CHECK(norm(pp.cycles[1].polyline.front()) == doctest::Approx(std::sqrt(1.1)).epsilon(1e-6));
  CHECK(pp.cycles[0].stability == CycleStability::attracting);
  CHECK(pp.cycles[1].stability == CycleStability::repelling);
  CHECK(pp.cycles[2].multiplicity == 2);
  CHECK(pp.cycles[0].multiplicity == 1);
}

TEST_CASE("logistic cycle") {
  const FieldFamily f = model_logistic_cycle();
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  REQUIRE(pp.cycles.size() == 1);
  const auto& c = pp.cycles[0];
  CHECK(c.multiplicity == 1);
  CHECK(c.stability == CycleStability::attracting);
  CHECK(std::abs(c.multiplier - std::exp(-kTwoPi)) <= 1e-6 * std::exp(-kTwoPi));
  CHECK_FALSE(c.interesting);
  CHECK(detect_non_andronov(pp).empty());
}

TEST_CASE("parabolic cycle model") {
  const FieldFamily f = model_basic(BasicKind::PC);
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  REQUIRE(pp.cycles.size() == 1);
  CHECK(pp.cycles[0].multiplicity == 2);
  CHECK(std::abs(pp.cycles[0].multiplier - 1.0) < 1e-6);
  const auto na = detect_non_andronov(pp);
  REQUIRE(na.size() == 1);
  CHECK(na[0].kind == NonAndronovKind::non_hyperbolic_limit_cycle);
}

TEST_CASE("Hopf cycle multiplier") {
  const FieldFamily f = model_basic(BasicKind::AH);
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.04});
  REQUIRE(pp.cycles.size() == 1);
  // r' = r (eps - r^2): linearization -2 eps at r = sqrt(eps).
  CHECK(pp.cycles[0].multiplier == doctest::Approx(std::exp(-0.08 * kTwoPi)).epsilon(1e-6));
  CHECK(norm(pp.cycles[0].polyline.front()) == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("interesting cycle fixture") {
  PhasePortrait pp;
  SingularPoint a, b;
  a.id = 0;
  a.location = {0.0, 0.0};
  a.cls = PointClass::hyperbolic_saddle;
  a.hyperbolic = true;
  a.eigenvalues = {std::complex<double>(-1.0), std::complex<double>(1.0)};
  b = a;
  b.id = 1;
  b.location = {2.0, 0.0};
  pp.singular_points = {a, b};
  LimitCycle c;
  c.polyline = circle(1.0);
  c.multiplicity = 2;
  c.nest_id = 0;
  pp.cycles = {c};
  pp.nests = {{0}};
  CHECK(classify_cycle_interesting(pp.cycles[0], pp));
  pp.cycles[0].multiplicity = 1;
  CHECK_FALSE(classify_cycle_interesting(pp.cycles[0], pp));
  pp.cycles[0].multiplicity = 0;
  CHECK_THROWS_AS(classify_cycle_interesting(pp.cycles[0], pp), Unresolvable);
  // Only a repeller outside.
  pp.cycles[0].multiplicity = 2;
  pp.singular_points[1].eigenvalues = {std::complex<double>(1.0), std::complex<double>(2.0)};
  pp.singular_points[1].cls = PointClass::hyperbolic_node;
  CHECK_FALSE(classify_cycle_interesting(pp.cycles[0], pp));
}

TEST_CASE("limit sets in the two-parabolic family") {
  const FieldFamily f = model_two_parabolic_cycles();
  PortraitOptions o;
  o.trace = false;
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0, 0.0}, o);
  const auto w = classify_limit_set(f, pp, {0.5, 0.0}, TimeDirection::omega);
  CHECK(w.kind == LabelKind::limit_cycle);
  CHECK(w.target_id == pp.cycles[0].id);
  CHECK_FALSE(w.interesting);
  const auto a = classify_limit_set(f, pp, {0.5, 0.0}, TimeDirection::alpha);
  CHECK(a.kind == LabelKind::singular_point);
  CHECK_FALSE(a.interesting);
  const auto out = classify_limit_set(f, pp, {2.5, 0.0}, TimeDirection::omega);
  CHECK(out.kind == LabelKind::boundary_exit);
  const auto self = classify_limit_set(f, pp, {0.0, 0.0}, TimeDirection::omega);
  CHECK(self.kind == LabelKind::singular_point);
  CHECK(self.target_id == 0);
}

TEST_CASE("separatrix loop") {
  const FieldFamily f = model_basic(BasicKind::SL);
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  int saddle = -1;
  for (const auto& sp : pp.singular_points)
    if (sp.cls == PointClass::hyperbolic_saddle) saddle = sp.id;
  REQUIRE(saddle >= 0);
  CHECK(norm(pp.singular_points[saddle].location) < 1e-9);
  bool loop = false;
  for (const auto& s : pp.separatrices) {
    if (s.owner == saddle && !s.stable && s.omega.kind == LabelKind::polycycle) loop = true;
  }
  CHECK(loop);
  const auto na = detect_non_andronov(pp);
  CHECK(count_kind(na, NonAndronovKind::saddle_connection) == 1);
  const auto inner = classify_limit_set(f, pp, {0.05, 0.0}, TimeDirection::omega);
  CHECK(inner.kind == LabelKind::polycycle);
  CHECK(inner.interesting);
}

TEST_CASE("split loop is not a connection") {
  const FieldFamily f = model_basic(BasicKind::SL);
  for (double e : {-0.01, 0.01}) {
    const PhasePortrait pp = compute_portrait(f, ParamPoint{e});
    CHECK(count_kind(detect_non_andronov(pp), NonAndronovKind::saddle_connection) == 0);
  }
}

TEST_CASE("heteroclinic connection") {
  const FieldFamily f = model_basic(BasicKind::SC);
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  CHECK(pp.singular_points.size() == 2);
  CHECK(count_kind(detect_non_andronov(pp), NonAndronovKind::saddle_connection) == 1);
  const PhasePortrait off = compute_portrait(f, ParamPoint{0.02});
  CHECK(detect_non_andronov(off).empty());
}

TEST_CASE("linear saddle separatrices") {
  const FieldFamily f = model_linear_saddle();
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  REQUIRE(pp.separatrices.size() == 4);
  for (const auto& s : pp.separatrices) {
    const auto& far = s.stable ? s.alpha : s.omega;
    CHECK(far.kind == LabelKind::boundary_exit);
  }
  CHECK(detect_non_andronov(pp).empty());
}

TEST_CASE("saddle-node separatrices") {
  const FieldFamily f = model_basic(BasicKind::SN);
  const PhasePortrait pp = compute_portrait(f, ParamPoint{0.0});
  REQUIRE(pp.separatrices.size() == 3);
  int center = 0;
  for (const auto& s : pp.separatrices) {
    if (s.center_branch) {
      ++center;
      CHECK(s.polyline.back().x > 0.5);
    } else {
      CHECK(s.stable);
      CHECK(std::abs(s.polyline.back().y) > 0.5);
    }
  }
  CHECK(center == 1);
  const auto na = detect_non_andronov(pp);
  REQUIRE(na.size() == 1);
  CHECK(na[0].kind == NonAndronovKind::non_hyperbolic_singular_point);
  // Node side converges to the fold point.
  const auto w = classify_limit_set(f, pp, {-0.5, 0.3}, TimeDirection::omega);
  CHECK(w.kind == LabelKind::singular_point);
  CHECK(w.interesting);
}

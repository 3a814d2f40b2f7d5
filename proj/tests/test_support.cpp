#include <cmath>

#include "doctest.h"
#include "lbs/support.hpp"

using namespace lbs;

namespace {

constexpr double kTwoPi = 6.283185307179586;

// shared between cases, it takes a few seconds
const LbsResult& two_parabolic_lbs() {
  static const LbsResult r = compute_lbs(model_two_parabolic_cycles(), 0.01);
  return r;
}

// Max over points of the distance to the circle |p| = r.
double off_circle(const std::vector<Vec2>& pts, double r) {
  double d = 0.0;
  for (const auto& p : pts) d = std::max(d, std::abs(norm(p) - r));
  return d;
}

// Max over circle samples of the distance to the nearest point.
double circle_gap(const std::vector<Vec2>& pts, double r) {
  std::vector<Vec2> c;
  for (int i = 0; i < 720; ++i) c.push_back({r * std::cos(kTwoPi * i / 720), r * std::sin(kTwoPi * i / 720)});
  return directed_hausdorff(c, pts);
}

}  // namespace

TEST_CASE("default shells shrink by 5 down to h^2") {
  const auto s = default_shells(0.01);
  REQUIRE(s.size() >= 3);
  CHECK(s.front() == doctest::Approx(0.05));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(s[i - 1] / 5.0));
  CHECK(s.back() < 1e-4);
  CHECK(s[s.size() - 2] >= 1e-4);
}

TEST_CASE("shell samples lie on the sup-norm sphere") {
  for (double rho : {0.05, 0.002}) {
    const auto pts = shell_samples(2, rho, 8);
    CHECK(pts.size() >= 8);
    for (const auto& e : pts) CHECK(e.sup_norm() == doctest::Approx(rho));
  }
  const auto line = shell_samples(1, 0.01, 8);
  for (const auto& e : line) {
    CHECK(e.sup_norm() <= 0.01 + 1e-15);
    CHECK(e.sup_norm() > 0.0);
  }
}

TEST_CASE("thinning and single-linkage components") {
  const double h = 0.01;
  std::vector<TaggedPoint> pts{{{0, 0}, Provenance::per}, {{0.001, 0}, Provenance::sep}, {{0.025, 0}, Provenance::per}};
  thin_points(pts, h);
  CHECK(pts.size() == 2);
  SupportSet s;
  s.h = h;
  // a chain with 2.5h gaps is one component, a point 10h away is another
  for (int i = 0; i < 5; ++i) s.points.push_back({{0.025 * i, 0.0}, Provenance::per});
  s.points.push_back({{0.2, 0.5}, Provenance::sing});
  s.recompute_components();
  CHECK(s.component_count == 2);
  CHECK(s.component_points(0).size() == 5);
  CHECK(s.match_radius() == doctest::Approx(0.03));
}

TEST_CASE("two parabolic cycles: LBS is the two circles") {
  const auto& r = two_parabolic_lbs();
  const double h = 0.01;
  REQUIRE(r.lbs.component_count == 2);
  std::vector<double> radii;
  for (int c = 0; c < 2; ++c) {
    const auto pts = r.lbs.component_points(c);
    radii.push_back(norm(pts.front()));
  }
  const int inner = radii[0] < radii[1] ? 0 : 1;
  CHECK(off_circle(r.lbs.component_points(inner), 1.0) <= 3 * h);
  CHECK(off_circle(r.lbs.component_points(1 - inner), 2.0) <= 3 * h);
  CHECK(circle_gap(r.lbs.component_points(inner), 1.0) <= 3 * h);
  CHECK(circle_gap(r.lbs.component_points(1 - inner), 2.0) <= 3 * h);
  for (const auto& tp : r.lbs.points) CHECK(tp.tag != Provenance::elbs_orbit);
}

TEST_CASE("two parabolic cycles: witnesses and consistency") {
  const auto& r = two_parabolic_lbs();
  const auto p7 = check_prop7(r.lbs, r.portrait);
  CHECK(p7.pass);
  CHECK(check_lbs_consistency(r).pass);
  CHECK(r.lbs_star.points.size() <= r.lbs.points.size());
}

TEST_CASE("structurally stable families have empty LBS") {
  for (const auto& f : {model_logistic_cycle(), model_linear_sink(), model_linear_saddle()}) {
    const auto r = compute_lbs(f, 0.02);
    CHECK_MESSAGE(r.lbs.empty(), f.name());
    CHECK(r.lbs.component_count == 0);
    CHECK(check_prop7(r.lbs, r.portrait).pass);
  }
}

TEST_CASE("Andronov-Hopf: one point at the focus, removed in LBS*") {
  const auto r = compute_lbs(model_basic(BasicKind::AH), 0.01);
  REQUIRE(r.lbs.component_count == 1);
  for (const auto& p : r.lbs.coords()) CHECK(norm(p) <= 0.03);
  CHECK(r.lbs_star.empty());
}

TEST_CASE("saddle connection: LBS follows the connection") {
  const auto r = compute_lbs(model_basic(BasicKind::SC), 0.01);
  CHECK(r.lbs.component_count == 1);
  const auto p7 = check_prop7(r.lbs, r.portrait);
  CHECK(p7.pass);
}

TEST_CASE("cut function missing the outer circle is rejected") {
  const FieldFamily f = model_two_parabolic_cycles();
  const CutFunction phi = make_bump(Region::annulus(0.7, 1.5), Region::annulus(0.5, 1.8), 3);
  CHECK_THROWS_AS(check_stabilization_invariance(f, phi, 0.01), PreconditionError);
}

TEST_CASE("overlapping split supports are rejected") {
  const FieldFamily f = model_two_parabolic_cycles();
  const SplittingData d{f, 1, make_bump(Region::annulus(0.8, 1.6), Region::annulus(0.6, 1.8), 3),
                        make_bump(Region::annulus(1.8, 2.2), Region::annulus(1.6, 2.4), 3)};
  CHECK_THROWS_AS(check_split_inclusion(d, 0.01), PreconditionError);
}

TEST_CASE("sweep rejects bad shells") {
  const FieldFamily f = model_logistic_cycle();
  CHECK_THROWS_AS(sweep(f, {0.05, 0.01}), PreconditionError);
  CHECK_THROWS_AS(sweep(f, {0.05, 0.06, 0.01}), PreconditionError);
}

#include <cmath>

#include "doctest.h"
#include "lbs/field_model.hpp"

using namespace lbs;

namespace {

void check_jacobian(const FieldFamily& f, const ParamPoint& eps, const Vec2& p) {
  const Mat2 ja = f.jacobian(eps, p);
  const Mat2 jf = f.jacobian_fd(eps, p, 1e-6);
  const double scale = std::max({1.0, std::abs(ja.a), std::abs(ja.b), std::abs(ja.c), std::abs(ja.d)});
  CHECK(std::abs(ja.a - jf.a) <= 1e-5 * scale);
  CHECK(std::abs(ja.b - jf.b) <= 1e-5 * scale);
  CHECK(std::abs(ja.c - jf.c) <= 1e-5 * scale);
  CHECK(std::abs(ja.d - jf.d) <= 1e-5 * scale);
}

bool close(const Vec2& a, const Vec2& b) { return distance(a, b) <= 1e-14 * std::max(1.0, norm(b)); }

}  // namespace

TEST_CASE("smoothstep polynomials") {
  // Order 1 is the cubic 3t^2 - 2t^3; order 2 is 6t^5 - 15t^4 + 10t^3.
  for (double t : {0.1, 0.3, 0.77}) {
    CHECK(smoothstep(1, t) == doctest::Approx(3 * t * t - 2 * t * t * t));
    CHECK(smoothstep(2, t) == doctest::Approx(6 * std::pow(t, 5) - 15 * std::pow(t, 4) + 10 * std::pow(t, 3)));
  }
  for (int order : {2, 3, 5, kSmoothInfinity}) {
    CHECK(smoothstep(order, 0.5) == doctest::Approx(0.5));
    CHECK(smoothstep(order, 0.0) == 0.0);
    CHECK(smoothstep(order, 1.0) == 1.0);
    for (double t : {0.2, 0.6, 0.9}) {
      const double fd = (smoothstep(order, t + 1e-6) - smoothstep(order, t - 1e-6)) / 2e-6;
      CHECK(smoothstep_derivative(order, t) == doctest::Approx(fd).epsilon(1e-6));
      CHECK(smoothstep(order, t) + smoothstep(order, 1.0 - t) == doctest::Approx(1.0));
    }
  }
  CHECK(default_cut_order(2) == 3);
  CHECK(default_cut_order(4) == 5);
}

TEST_CASE("make_bump on annuli") {
  const auto phi = make_bump(Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.4), 3);
  CHECK(phi.eval({1.0, 0.0}) == 1.0);
  CHECK(phi.eval({0.5, 0.0}) == 0.0);
  CHECK(phi.eval({0.0, 1.5}) == 0.0);
  CHECK(phi.eval({0.7, 0.0}) == doctest::Approx(0.5));
  CHECK(phi.eval({0.0, -1.3}) == doctest::Approx(0.5));
  for (double r = 0.0; r < 2.0; r += 0.013) {
    const double v = phi.eval({r * std::cos(1.0), r * std::sin(1.0)});
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const Vec2 p{0.5, 0.45};
  const Vec2 g = phi.gradient(p);
  const double gx = (phi.eval(p + Vec2{1e-6, 0}) - phi.eval(p - Vec2{1e-6, 0})) / 2e-6;
  const double gy = (phi.eval(p + Vec2{0, 1e-6}) - phi.eval(p - Vec2{0, 1e-6})) / 2e-6;
  CHECK(g.x == doctest::Approx(gx).epsilon(1e-6));
  CHECK(g.y == doctest::Approx(gy).epsilon(1e-6));
}

TEST_CASE("make_bump on disks and boxes") {
  const auto disk = make_bump(Region::disk(1.0), Region::disk(2.0), 4);
  CHECK(disk.eval({0.0, 0.0}) == 1.0);
  CHECK(disk.eval({1.5, 0.0}) == doctest::Approx(0.5));
  const auto box = make_bump(Region::rect(-1, 1, -1, 1), Region::rect(-2, 2, -3, 3), 3);
  CHECK(box.eval({0.0, 0.0}) == 1.0);
  CHECK(box.eval({1.5, 0.0}) == doctest::Approx(0.5));
  CHECK(box.eval({1.5, 2.0}) == doctest::Approx(0.25));
  CHECK(box.eval({2.5, 0.0}) == 0.0);
}

TEST_CASE("make_bump rejects bad input") {
  CHECK_THROWS_AS(make_bump(Region::annulus(0.6, 1.4), Region::annulus(0.6, 1.4), 3), RegionError);
  CHECK_THROWS_AS(make_bump(Region::annulus(0.5, 1.5), Region::annulus(0.6, 1.4), 3), RegionError);
  CHECK_THROWS_AS(make_bump(Region::annulus(0.8, 1.2), Region::rect(-2, 2, -2, 2), 3), RegionError);
  CHECK_THROWS_AS(make_bump(Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.4), 1), PreconditionError);
}

TEST_CASE("builtin jacobians match central differences") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const FieldFamily f = builtin_family(name);
    ParamPoint eps = ParamPoint::zero(f.base_dim());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = 0.013 * (i + 1);
    const Rect b = f.domain().region.bounds();
    for (int k = 0; k < 8; ++k) {
      const Vec2 p{b.x_min + (b.x_max - b.x_min) * (0.21 + 0.07 * k), b.y_min + (b.y_max - b.y_min) * (0.61 - 0.05 * k)};
      if (!f.contains(p)) continue;
      check_jacobian(f, eps, p);
    }
  }
}

TEST_CASE("two-parabolic radial profile") {
  const FieldFamily f = model_two_parabolic_cycles();
  const ParamPoint zero{0.0, 0.0};
  // r' = x x' + y y' over r; positive off the cycles, zero on them.
  auto rdot = [&](const ParamPoint& e, double r) {
    const Vec2 v = f.eval(e, {r, 0.0});
    return v.x;
  };
  for (double r : {0.3, 0.9, 1.5, 1.9, 2.5, 2.99}) CHECK(rdot(zero, r) > 0.0);
  CHECK(rdot(zero, 1.0) == doctest::Approx(0.0));
  CHECK(rdot(zero, 2.0) == doctest::Approx(0.0));
  const ParamPoint e{-0.01, 0.0};
  CHECK(rdot(e, std::sqrt(0.9)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rdot(e, std::sqrt(1.1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.domain().boundary == BoundaryBehavior::outflow);
  CHECK_THROWS_AS(f.eval(zero, {3.5, 0.0}), DomainError);
  CHECK_THROWS_AS(f.eval(ParamPoint{0.0}, {1.0, 0.0}), PreconditionError);
}

TEST_CASE("synchronized family ignores delta") {
  const FieldFamily s = model_synchronized_cycles();
  const FieldFamily t = model_two_parabolic_cycles();
  CHECK(s.base_dim() == 2);
  for (double eps : {-0.02, 0.0, 0.03}) {
    for (double r : {0.5, 1.0, 1.7, 2.2}) {
      const Vec2 p{r * 0.6, r * 0.8};
      const Vec2 a = s.eval(ParamPoint{eps, 0.0}, p);
      const Vec2 b = s.eval(ParamPoint{eps, 0.5}, p);
      const Vec2 c = t.eval(ParamPoint{eps, eps}, p);
      CHECK(a == b);
      CHECK(a == c);
    }
  }
}

TEST_CASE("basic models") {
  const FieldFamily sn = model_basic(BasicKind::SN);
  const Vec2 v = sn.eval(ParamPoint{-0.04}, {0.2, 0.0});
  CHECK(std::abs(v.x) < 1e-15);
  const Mat2 j = sn.jacobian(ParamPoint{-0.04}, {0.2, 0.0});
  CHECK(j.a == doctest::Approx(0.4));
  CHECK(j.d == doctest::Approx(-1.0));
  CHECK(sn.jacobian(ParamPoint{-0.04}, {-0.2, 0.0}).a == doctest::Approx(-0.4));
  CHECK_THROWS_AS(model_basic(BasicKind::HC), UnsupportedModel);
  CHECK_THROWS_AS(builtin_family("nonsense"), UnsupportedModel);
  // SC: saddles at (-1, eps) and (1, -eps).
  const FieldFamily sc = model_basic(BasicKind::SC);
  CHECK(norm(sc.eval(ParamPoint{0.02}, {-1.0, 0.02})) < 1e-15);
  CHECK(norm(sc.eval(ParamPoint{0.02}, {1.0, -0.02})) < 1e-15);
  // SL: saddle at the origin at eps = 0.
  const FieldFamily sl = model_basic(BasicKind::SL);
  CHECK(norm(sl.eval(ParamPoint{0.0}, {0.0, 0.0})) == 0.0);
  // The nodal cubic is invariant at eps = 0: grad F . v = 0.6 (x - 2/3) F.
  for (double x : {0.1, 0.4, 0.9}) {
    const double y = x * std::sqrt(1.0 - x);
    const Vec2 w = sl.eval(ParamPoint{0.0}, {x, y});
    const Vec2 grad{-2.0 * x + 3.0 * x * x, 2.0 * y};
    CHECK(std::abs(dot(grad, w)) < 1e-12);
  }
}

TEST_CASE("split family formula") {
  const FieldFamily v = model_two_parabolic_cycles();
  const auto phi1 = make_bump(Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.4), 3);
  const auto phi2 = make_bump(Region::annulus(1.8, 2.2), Region::annulus(1.6, 2.4), 3);
  const FieldFamily w = split_family(SplittingData{v, 1, phi1, phi2});
  const ParamPoint e{0.03, -0.02};
  const ParamPoint z{0.0, 0.0};
  for (double r : {0.3, 0.65, 1.0, 1.3, 1.5, 1.7, 2.0, 2.3, 2.8}) {
    const Vec2 p{r * std::cos(0.4), r * std::sin(0.4)};
    const Vec2 v0 = v.eval(z, p);
    const Vec2 expect = v0 + phi1.eval(p) * (v.eval(ParamPoint{0.03, 0.0}, p) - v0) +
                        phi2.eval(p) * (v.eval(ParamPoint{0.0, -0.02}, p) - v0);
    const Vec2 got = w.eval(e, p);
    CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-14));
    CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-14));
    CHECK(w.eval(z, p) == v0);
    check_jacobian(w, e, p);
  }
  // On phi1 = 1 the split family is v at (eps1, 0).
  const Vec2 q{1.0, 0.0};
  CHECK(close(w.eval(e, q), v.eval(ParamPoint{0.03, 0.0}, q)));
}

TEST_CASE("split family rejects overlapping supports") {
  const FieldFamily v = model_two_parabolic_cycles();
  const auto phi1 = make_bump(Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.7), 3);
  const auto phi2 = make_bump(Region::annulus(1.8, 2.2), Region::annulus(1.6, 2.4), 3);
  CHECK_THROWS_AS(split_family(SplittingData{v, 1, phi1, phi2}), PreconditionError);
  CHECK_THROWS_AS(split_family(SplittingData{v, 2, phi1, phi2}), PreconditionError);
}

TEST_CASE("stabilization formula") {
  const FieldFamily v = model_two_parabolic_cycles();
  const auto phi = make_bump(Region::annulus(0.7, 2.3), Region::annulus(0.5, 2.5), 3);
  const FieldFamily w = stabilize(v, phi);
  const ParamPoint e{0.02, -0.01};
  const ParamPoint z{0.0, 0.0};
  CHECK(close(w.eval(e, {1.5, 0.0}), v.eval(e, {1.5, 0.0})));
  CHECK(w.eval(e, {0.2, 0.1}) == v.eval(z, {0.2, 0.1}));
  CHECK(w.eval(e, {2.7, 0.0}) == v.eval(z, {2.7, 0.0}));
  for (double r : {0.55, 0.6, 2.4, 2.45}) check_jacobian(w, e, {r * 0.8, r * 0.6});
}

TEST_CASE("trivial extension") {
  const FieldFamily pc = model_basic(BasicKind::PC);
  const FieldFamily ext = extend_trivially(pc, 1);
  CHECK(ext.base_dim() == 2);
  CHECK(ext.eval(ParamPoint{0.01, 0.3}, {1.0, 0.2}) == ext.eval(ParamPoint{0.01, 0.0}, {1.0, 0.2}));
  CHECK(ext.eval(ParamPoint{0.01, 0.3}, {1.0, 0.2}) == pc.eval(ParamPoint{0.01}, {1.0, 0.2}));
  CHECK_THROWS_AS(extend_trivially(pc, 0), PreconditionError);
}

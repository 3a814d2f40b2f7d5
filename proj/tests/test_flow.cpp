#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lbs/flow.hpp"

using namespace lbs;

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Closed-form solution of r' = r (1 - r).
double logistic_r(double r0, double t) { return r0 * std::exp(t) / (1.0 + r0 * (std::exp(t) - 1.0)); }

// Ray {theta = 0, r in [lo, hi]}.
Section ray(double lo, double hi) { return Section{{0.5 * (lo + hi), 0.0}, {1.0, 0.0}, 0.5 * (hi - lo), 1}; }

}  // namespace

TEST_CASE("linear sink converges to the origin") {
  const FieldFamily f = model_linear_sink();
  const Trajectory t = integrate(f, ParamPoint{0.0}, {1.0, 0.0}, 10.0, 1e-9);
  CHECK(t.terminal == Terminal::converged_to_point);
  CHECK(norm(t.end()) < 1e-3);
  for (std::size_t i = 1; i < t.samples.size(); ++i) CHECK(t.samples[i].t > t.samples[i - 1].t);
}

TEST_CASE("logistic radial solution") {
  const FieldFamily f = model_logistic_cycle();
  const double tol = 1e-9;
  const Trajectory t = integrate(f, ParamPoint{0.0}, {0.5, 0.0}, kTwoPi, tol);
  CHECK(t.terminal == Terminal::time_limit);
  CHECK(t.samples.back().t == doctest::Approx(kTwoPi));
  CHECK(std::abs(norm(t.end()) - logistic_r(0.5, kTwoPi)) <= 10.0 * tol);
  // theta' = 1, so after 2 pi the point is back on the positive x axis.
  CHECK(std::abs(t.end().y) <= 10.0 * tol);
}

TEST_CASE("outflow boundary exit") {
  const FieldFamily f = model_two_parabolic_cycles();
  const Trajectory t = integrate(f, ParamPoint{0.0, 0.0}, {3.0, 0.0}, 10.0, 1e-9);
  CHECK(t.terminal == Terminal::left_domain);
  CHECK(t.samples.size() <= 2);
  CHECK_THROWS_AS(integrate(f, ParamPoint{0.0, 0.0}, {3.1, 0.0}, 1.0, 1e-9), DomainError);
  CHECK_THROWS_AS(integrate(f, ParamPoint{0.0, 0.0}, {1.0, 0.0}, 0.0, 1e-9), PreconditionError);
}

TEST_CASE("time reversal") {
  const FieldFamily f = model_basic(BasicKind::SL);
  const double tol = 1e-10;
  const ParamPoint e{0.01};
  const Vec2 x0{0.4, 0.1};
  const Trajectory fwd = integrate(f, e, x0, 3.0, tol);
  REQUIRE(fwd.terminal == Terminal::time_limit);
  const Trajectory back = integrate(f, e, fwd.end(), -3.0, tol);
  REQUIRE(back.terminal == Terminal::time_limit);
  CHECK(back.samples.back().t == doctest::Approx(-3.0));
  CHECK(distance(back.end(), x0) <= 100.0 * tol);
}

TEST_CASE("logistic return map multiplier") {
  const FieldFamily f = model_logistic_cycle();
  const auto r = return_map(f, ParamPoint{0.0}, ray(0.5, 1.5), 0.0, 1e-11);
  CHECK(std::abs(r.s_out) < 1e-9);
  CHECK(r.flight_time == doctest::Approx(kTwoPi).epsilon(1e-9));
  const double expect = std::exp(-kTwoPi);  // 1.8674e-3
  CHECK(std::abs(r.dP - expect) <= 1e-6 * expect);
  // Off the cycle the return is the closed-form map.
  const auto q = return_map(f, ParamPoint{0.0}, ray(0.5, 1.5), -0.3, 1e-11);
  CHECK(q.s_out + 1.0 == doctest::Approx(logistic_r(0.7, kTwoPi)).epsilon(1e-9));
  const double r0 = 0.7, E = std::exp(kTwoPi);
  const double dP_exact = E / std::pow(1.0 + r0 * (E - 1.0), 2);
  CHECK(q.dP == doctest::Approx(dP_exact).epsilon(1e-7));
}

TEST_CASE("parabolic cycle has unit multiplier") {
  const FieldFamily f = model_basic(BasicKind::PC);
  const auto r = return_map(f, ParamPoint{0.0}, ray(0.5, 1.5), 0.0, 1e-11);
  CHECK(std::abs(r.s_out) < 1e-9);
  CHECK(std::abs(r.dP - 1.0) <= 1e-6);
}

TEST_CASE("return from a singular point fails") {
  const FieldFamily f = model_logistic_cycle();
  CHECK_THROWS_AS(return_map(f, ParamPoint{0.0}, ray(0.5, 1.5), -1.0, 1e-9), NoReturn);
  // Orbits leaving the domain never return.
  const FieldFamily g = model_two_parabolic_cycles();
  CHECK_THROWS_AS(return_map(g, ParamPoint{0.05, 0.05}, ray(2.5, 2.99), 0.2, 1e-9), NoReturn);
}

TEST_CASE("variational derivative matches finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int checked = 0;
  for (const auto& name : builtin_names()) {
    const FieldFamily f = builtin_family(name);
    if (f.sections().empty() || name == "linear_center") continue;
    for (int k = 0; k < 4; ++k) {
      ParamPoint e = ParamPoint::zero(f.base_dim());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.01 * u(rng);
      const Section& sec = f.sections().front();
      const double s = u(rng) * sec.half_length;
      try {
        const auto r = return_map(f, e, sec, s, 1e-12);
        const double fd = return_map_fd(f, e, sec, s, 1e-12, 1e-5);
        CAPTURE(name);
        CAPTURE(s);
        CHECK(std::abs(r.dP - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
        ++checked;
      } catch (const NoReturn&) {
      }
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("return map composition") {
  const FieldFamily f = model_basic(BasicKind::AH);
  const ParamPoint e{0.04};
  const Section sec = f.sections().front();
  const double tol = 1e-11;
  const auto p1 = return_map(f, e, sec, 0.1, tol);
  const auto p2 = return_map(f, e, sec, p1.s_out, tol);
  // Flow the seed for both flight times at once and land on P(P(s)).
  const Trajectory t = integrate(f, e, sec.point(0.1), p1.flight_time + p2.flight_time, tol);
  CHECK(std::abs(sec.coordinate(t.end()) - p2.s_out) <= 10.0 * tol);
  CHECK(std::abs(sec.offset(t.end())) <= 10.0 * tol);
}

TEST_CASE("fixed points of the logistic return map") {
  const FieldFamily f = model_logistic_cycle();
  const auto scan = fixed_points_of_return(f, ParamPoint{0.0}, f.sections().front(), 1e-10);
  CHECK_FALSE(scan.continuum_suspected);
  REQUIRE(scan.points.size() == 1);
  CHECK(f.sections().front().point(scan.points[0].s).x == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fixed points of the two-parabolic family") {
  const FieldFamily f = model_two_parabolic_cycles();
  const auto scan = fixed_points_of_return(f, ParamPoint{-0.01, 0.0}, ray(0.5, 1.5), 1e-10);
  REQUIRE(scan.points.size() == 2);
  CHECK(scan.points[0].s + 1.0 == doctest::Approx(std::sqrt(0.9)).epsilon(1e-7));
  CHECK(scan.points[1].s + 1.0 == doctest::Approx(std::sqrt(1.1)).epsilon(1e-7));
  CHECK(scan.points[0].dP < 1.0);
  CHECK(scan.points[1].dP > 1.0);
}

TEST_CASE("tangent fixed points at the parabolic cycles") {
  const FieldFamily f = model_two_parabolic_cycles();
  const auto scan = fixed_points_of_return(f, ParamPoint{0.0, 0.0}, f.sections().front(), 1e-11);
  REQUIRE(scan.points.size() == 2);
  const Section& sec = f.sections().front();
  CHECK(sec.point(scan.points[0].s).x == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sec.point(scan.points[1].s).x == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(scan.points[0].tangency);
}

TEST_CASE("linear center is flagged as a continuum") {
  const FieldFamily f = model_linear_center();
  const auto scan = fixed_points_of_return(f, ParamPoint{0.0}, f.sections().front(), 1e-10);
  CHECK(scan.continuum_suspected);
  CHECK(scan.points.empty());
}

TEST_CASE("trajectory csv") {
  Trajectory t;
  t.samples = {{0.0, {1.0, 0.0}}, {0.5, {0.25, -0.125}}};
  std::ostringstream os;
  write_trajectory_csv(os, t);
  CHECK(os.str() == "t,x,y\n0,1,0\n0.5,0.25,-0.125\n");
}

#include <cmath>
#include <functional>

#include "doctest.h"
#include "lbs/diagram.hpp"

using namespace lbs;

namespace {

// 20 x 20 diagram on [-0.05, 0.05]^2 with an SN label in every cell where `mark` holds.
BifurcationDiagram synthetic(const std::function<bool(double, double)>& mark) {
  BifurcationDiagram bd;
  bd.grid = GridSpec::box(2, 0.05, 0.005);
  bd.axes = {0, 1};
  bd.shape = {20, 20};
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      DiagramCell c;
      c.index = {i, j};
      const double x = -0.05 + 0.005 * (i + 0.5), y = -0.05 + 0.005 * (j + 0.5);
      if (mark(x, y)) {
        DegeneracyLabel l;
        l.cls = DegeneracyClass::SN;
        l.where = ParamPoint{x, y};
        c.labels.push_back(l);
      }
      bd.cells.push_back(c);
    }
  }
  return bd;
}

// 1-parameter diagram with one label at `at`.
BifurcationDiagram synthetic_line(std::size_t axis, std::optional<double> at) {
  BifurcationDiagram bd;
  bd.grid = GridSpec::box(2, 0.05, 0.005);
  bd.grid.lo[1 - axis] = bd.grid.hi[1 - axis] = 0.0;
  bd.axes = {axis};
  bd.shape = {20};
  for (std::size_t i = 0; i < 20; ++i) bd.cells.push_back(DiagramCell{{i}, {}, false});
  if (at) {
    DiagramCurve cv{DegeneracyClass::PC, 0, {}, {}, ParamPoint{0.0, 0.0}};
    cv.estimate[axis] = *at;
    bd.curves.push_back(cv);
  }
  return bd;
}

bool near_zero(double v) { return std::abs(v) < 0.005; }

}  // namespace

TEST_CASE("grid spec") {
  const GridSpec g = GridSpec::box(2, 0.05, 0.005);
  CHECK(g.free_axes().size() == 2);
  CHECK(g.nodes_along(0) == 21);
  CHECK_NOTHROW(g.validate(2));
  CHECK_THROWS_AS(g.validate(1), PreconditionError);
  GridSpec bad = g;
  bad.step = 0.003;
  CHECK_THROWS_AS(bad.validate(2), PreconditionError);
  GridSpec slice = g;
  slice.lo[1] = slice.hi[1] = 0.0;
  CHECK(slice.free_axes() == std::vector<std::size_t>{0});
}

TEST_CASE("cross comparison") {
  const auto cross = synthetic([](double x, double y) { return near_zero(x) || near_zero(y); });
  CHECK(compare_with_cross(cross, {0.0}, {0.0}).pass);
  // an extra diagonal is not in the cross
  const auto diag = synthetic([](double x, double y) { return near_zero(x) || near_zero(y) || std::abs(x - y) < 0.003; });
  CHECK_FALSE(compare_with_cross(diag, {0.0}, {0.0}).pass);
  // a missing half line is also a failure
  const auto half = synthetic([](double x, double y) { return near_zero(x) || (near_zero(y) && x < 0); });
  CHECK_FALSE(compare_with_cross(half, {0.0}, {0.0}).pass);
  const auto empty = synthetic([](double, double) { return false; });
  CHECK(compare_with_cross(empty, {}, {}).pass);
  CHECK_FALSE(compare_with_cross(empty, {0.0}, {}).pass);
}

TEST_CASE("product structure from synthetic slices") {
  const auto cross = synthetic([](double x, double y) { return near_zero(x) || near_zero(y); });
  CHECK(check_product_structure(cross, synthetic_line(0, 0.0), synthetic_line(1, 0.0)).pass);
  CHECK_FALSE(check_product_structure(cross, synthetic_line(0, 0.0), synthetic_line(1, std::nullopt)).pass);
  CHECK_FALSE(check_product_structure(cross, synthetic_line(0, 0.03), synthetic_line(1, 0.0)).pass);
  const auto empty = synthetic([](double, double) { return false; });
  CHECK(check_product_structure(empty, synthetic_line(0, std::nullopt), synthetic_line(1, std::nullopt)).pass);
  CHECK_THROWS_AS(diagram_values(cross), PreconditionError);
}

TEST_CASE("one-parameter scans find the basic degeneracies at zero") {
  const std::pair<BasicKind, DegeneracyClass> cases[] = {{BasicKind::AH, DegeneracyClass::AH},
                                                         {BasicKind::SN, DegeneracyClass::SN},
                                                         {BasicKind::SC, DegeneracyClass::SC},
                                                         {BasicKind::SL, DegeneracyClass::SL},
                                                         {BasicKind::PC, DegeneracyClass::PC}};
  for (const auto& [kind, cls] : cases) {
    const FieldFamily f = model_basic(kind);
    const GridSpec g = GridSpec::box(1, 0.05, 0.005);
    const auto bd = scan_diagram(f, g);
    REQUIRE_MESSAGE(bd.curves.size() == 1, to_string(kind));
    CHECK_MESSAGE(bd.curves[0].cls == cls, to_string(kind));
    CHECK(std::abs(bd.curves[0].estimate[0]) <= g.step);
    const auto v = diagram_values(bd);
    REQUIRE(v.size() == 1);
    CHECK(std::abs(v[0]) <= g.step);
  }
}

TEST_CASE("structurally stable families give empty diagrams") {
  const auto bd = scan_diagram(model_logistic_cycle(), GridSpec::box(1, 0.05, 0.005));
  CHECK(bd.curves.empty());
  for (std::size_t c = 0; c < bd.cells.size(); ++c) CHECK_FALSE(bd.labeled(c));
}

TEST_CASE("slice of the two-parabolic family") {
  const FieldFamily f = model_two_parabolic_cycles();
  GridSpec g = GridSpec::box(2, 0.05, 0.005);
  g.lo[1] = g.hi[1] = 0.0;
  const auto bd = scan_diagram(f, g, {Region::annulus(0.6, 1.4), Region::annulus(1.6, 2.4)});
  REQUIRE(bd.axes.size() == 1);
  // eps_2 = 0 keeps the outer cycle degenerate for every eps_1, so only the inner one moves
  std::size_t inner = 0;
  for (const auto& cv : bd.curves) {
    if (cv.region == 0) {
      ++inner;
      CHECK(cv.cls == DegeneracyClass::PC);
      CHECK(std::abs(cv.estimate[0]) <= g.step);
    }
  }
  CHECK(inner == 1);
  const auto r0 = restrict_to_region(bd, 0);
  CHECK(diagram_values(r0).size() == 1);
}

TEST_CASE("saddle connection splitting changes sign") {
  const FieldFamily f = model_basic(BasicKind::SC);
  REQUIRE(!f.probes().empty());
  const auto lo = probe_splitting(f, ParamPoint{-0.02}, f.probes()[0], 1e-10);
  const auto hi = probe_splitting(f, ParamPoint{0.02}, f.probes()[0], 1e-10);
  const auto mid = probe_splitting(f, ParamPoint{0.0}, f.probes()[0], 1e-10);
  REQUIRE(lo.has_value());
  REQUIRE(hi.has_value());
  REQUIRE(mid.has_value());
  CHECK(*lo * *hi < 0.0);
  CHECK(std::abs(*mid) < 1e-6);
}

TEST_CASE("structural stability off and on the diagram") {
  const FieldFamily f = model_two_parabolic_cycles();
  CHECK(check_structural_stability(f, ParamPoint{0.02, -0.03}).stable);
  CHECK_FALSE(check_structural_stability(f, ParamPoint{0.0, -0.03}).stable);
  CHECK_FALSE(check_structural_stability(f, ParamPoint{0.0, 0.0}).stable);
}

TEST_CASE("independence preconditions") {
  const GridSpec g = GridSpec::box(2, 0.05, 0.005);
  CHECK_THROWS_AS(check_independence(model_two_parabolic_cycles(), Region::annulus(0.6, 1.8),
                                     Region::annulus(1.6, 2.4), g),
                  PreconditionError);
  CHECK_THROWS_AS(check_independence(model_basic(BasicKind::AH), Region::annulus(0.1, 0.2),
                                     Region::annulus(0.5, 0.6), GridSpec::box(1, 0.05, 0.005)),
                  PreconditionError);
}

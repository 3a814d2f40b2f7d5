#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lbs/support.hpp"

namespace lbs {

enum class DegeneracyClass { AH, SN, HC, SC, SL, PC, none, other };

std::string to_string(DegeneracyClass c);

struct DegeneracyLabel {
  DegeneracyClass cls = DegeneracyClass::none;
  Vec2 location;            // phase point (cycle: point on its section)
  double discriminant = 0;  // value closest to zero among the cell corners
  ParamPoint where;         // parameter estimate of the zero
  int region = -1;          // first region containing the location, -1 if none
  bool tangency = false;    // a corner value below the detection floor
  std::string detail;
};

/// Lattice lo + k * step per coordinate; an axis with lo == hi is held fixed.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  double step = 0.005;

  std::vector<std::size_t> free_axes() const;
  std::size_t nodes_along(std::size_t axis) const;
  double value(std::size_t axis, std::size_t k) const { return lo[axis] + static_cast<double>(k) * step; }
  /// Throws PreconditionError unless the step divides every free axis evenly.
  void validate(std::size_t base_dim) const;
  static GridSpec box(std::size_t dim, double half_width, double step);
};

struct DiagramCell {
  std::vector<std::size_t> index;  // per free axis
  std::vector<DegeneracyLabel> labels;
  bool failed = false;
};

struct DiagramCurve {
  DegeneracyClass cls;
  int region;
  std::vector<std::size_t> cells;  // indices into BifurcationDiagram::cells
  std::vector<ParamPoint> path;    // label parameter estimates in cell order
  ParamPoint estimate;             // representative zero (tangency when available)
};

struct DiagramOptions {
  int seeds_per_axis = 16;
  // Coarser than the portrait defaults: a diagram evaluates hundreds of nodes.
  CycleOptions cycles = [] {
    CycleOptions c;
    c.tol = 1e-9;
    c.fixed.nodes = 120;
    return c;
  }();
  double tangency_floor = 1e-7;
  double side_floor = 1e-6;  // |l1|, |a|, |sigma - 1| below this make the label "other"
  double probe_tol = 1e-10;
};

struct BifurcationDiagram {
  GridSpec grid;
  std::vector<std::size_t> axes;             // free axes
  std::vector<std::size_t> shape;            // cells per free axis
  std::vector<DiagramCell> cells;            // row-major over `shape`
  std::vector<DiagramCurve> curves;
  std::vector<std::string> diagnostics;
  std::size_t region_count = 0;

  std::size_t cell_index(const std::vector<std::size_t>& idx) const;
  bool labeled(std::size_t cell, int region = -2) const;  // -2: any region
  ParamPoint cell_center(std::size_t cell) const;
};

/// Separatrix splitting (unstable minus stable crossing coordinate) for a probe.
std::optional<double> probe_splitting(const FieldFamily& family, const ParamPoint& eps, const ConnectionProbe& probe,
                                      double tol, Vec2* crossing = nullptr, double* characteristic = nullptr);

BifurcationDiagram scan_diagram(const FieldFamily& family, const GridSpec& grid, const std::vector<Region>& regions = {},
                                const DiagramOptions& opts = {});

/// Cells of a 2-parameter diagram carrying labels of one region only.
BifurcationDiagram restrict_to_region(const BifurcationDiagram& bd, int region);

/// Compares labeled cells of a 2-parameter BD with the union of the lines
/// eps_1 = a (a in lines1) and eps_2 = b (b in lines2); tolerance one cell.
CheckReport compare_with_cross(const BifurcationDiagram& bd, const std::vector<double>& lines1,
                               const std::vector<double>& lines2);

/// Parameter values of the labels of a 1-parameter diagram (one per curve).
std::vector<double> diagram_values(const BifurcationDiagram& bd);

CheckReport check_product_structure(const BifurcationDiagram& bd_w, const BifurcationDiagram& bd_v1,
                                    const BifurcationDiagram& bd_v2);

/// Scans W = split_family(data) on `grid` and the original family on the two
/// coordinate slices (phi1 support on the first block, phi2 support on the
/// second), then compares BD(W) with BD(V1) x B2 union B1 x BD(V2).
/// Only 1 + 1 parameter splits are supported.
CheckReport verify_product_structure(const SplittingData& data, const GridSpec& grid, const DiagramOptions& opts = {},
                                     BifurcationDiagram* bd_w_out = nullptr);

CheckReport check_independence(const FieldFamily& family, const Region& u1, const Region& u2, const GridSpec& grid,
                               const DiagramOptions& opts = {}, BifurcationDiagram* bd_out = nullptr);

struct StabilityResult {
  bool stable = false;
  std::vector<std::string> diagnostics;
};

StabilityResult check_structural_stability(const FieldFamily& family, const ParamPoint& eps,
                                           const PortraitOptions& opts = {});

}  // namespace lbs

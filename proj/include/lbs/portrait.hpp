#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbs/flow.hpp"

namespace lbs {

inline constexpr double kHyperbolicityFloor = 1e-6;

enum class PointClass { hyperbolic_saddle, hyperbolic_node, hyperbolic_focus, saddle_node, andronov_hopf, degenerate_other };

std::string to_string(PointClass c);

struct SingularPoint {
  int id = 0;
  Vec2 location;
  std::array<std::complex<double>, 2> eigenvalues;
  PointClass cls = PointClass::degenerate_other;
  std::optional<double> lyapunov1;      // set iff cls == andronov_hopf
  std::optional<double> sn_coefficient;  // quadratic center-manifold coefficient, when one eigenvalue vanishes
  bool hyperbolic = false;
  bool borderline = false;  // min |Re| within a decade of the floor

  bool attractor() const;  // hyperbolic, both Re < 0
  bool repeller() const;   // hyperbolic, both Re > 0
  bool has_hyperbolic_sector() const { return cls == PointClass::hyperbolic_saddle || cls == PointClass::saddle_node; }
};

/// Eigenvalue-based classification (with normal-form coefficients when needed).
SingularPoint classify_singular_point(const FieldFamily& family, const ParamPoint& eps, const Vec2& p,
                                      double floor = kHyperbolicityFloor);

/// First Lyapunov value at a point with a pure imaginary pair of eigenvalues.
double first_lyapunov_value(const FieldFamily& family, const ParamPoint& eps, const Vec2& p);

std::vector<SingularPoint> find_singular_points(const FieldFamily& family, const ParamPoint& eps, int seeds_per_axis,
                                                std::vector<std::string>* diagnostics = nullptr,
                                                double floor = kHyperbolicityFloor);

enum class CycleStability { attracting, repelling, semi_stable_outer_attracting, semi_stable_inner_attracting, unresolved };

std::string to_string(CycleStability s);

struct LimitCycle {
  int id = 0;
  int section_index = 0;
  double s = 0.0;  // section coordinate s*
  Polyline polyline;
  double period = 0.0;
  double multiplier = 1.0;
  double multiplier_uncertainty = 0.0;  // change under a 10x coarser tolerance, at least tol
  int multiplicity = 0;                 // 0 = unresolved (order > 3 or below the noise level)
  CycleStability stability = CycleStability::unresolved;
  int nest_id = -1;
  bool interesting = false;
  bool hyperbolic() const { return multiplicity == 1; }
};

struct CycleOptions {
  double tol = 1e-10;
  double floor = kHyperbolicityFloor;
  double derivative_step = 1e-3;      // eta for the central differences of dP
  double higher_order_floor = 1e-4;   // |d2P|, |d3P| below this count as zero
  FixedPointOptions fixed;
};

std::vector<LimitCycle> find_limit_cycles(const FieldFamily& family, const ParamPoint& eps,
                                          const std::vector<Section>& sections, const CycleOptions& opts = {},
                                          std::vector<std::string>* diagnostics = nullptr,
                                          bool* continuum_suspected = nullptr);

enum class LabelKind { singular_point, limit_cycle, polycycle, boundary_exit, unresolved };
enum class TimeDirection { alpha, omega };

std::string to_string(LabelKind k);

struct LimitSetLabel {
  LabelKind kind = LabelKind::unresolved;
  int target_id = -1;
  bool interesting = false;
  friend bool operator==(const LimitSetLabel&, const LimitSetLabel&) = default;
};

struct Separatrix {
  int id = 0;
  int owner = 0;
  bool stable = false;
  int side = 1;
  bool center_branch = false;  // saddle-node center-manifold branch
  Polyline polyline;
  LimitSetLabel alpha;
  LimitSetLabel omega;
};

struct PortraitOptions {
  int seeds_per_axis = 16;
  double tol = 1e-10;
  double t_max = 200.0;
  double sep_offset = 1e-6;
  double connection_radius = 1e-4;
  bool trace = true;  // separatrices
  CycleOptions cycles;
};

struct PhasePortrait {
  ParamPoint eps;
  BoundaryBehavior boundary = BoundaryBehavior::unspecified;
  std::vector<SingularPoint> singular_points;
  std::vector<LimitCycle> cycles;
  std::vector<Separatrix> separatrices;
  std::vector<std::vector<int>> nests;  // cycle ids per nest
  std::vector<std::string> diagnostics;
  bool continuum_suspected = false;
  bool unresolved() const;  // any object left unresolved
};

PhasePortrait compute_portrait(const FieldFamily& family, const ParamPoint& eps, const PortraitOptions& opts = {});

/// Interesting-cycle test; throws Unresolvable if a nest member's multiplicity is unresolved.
bool classify_cycle_interesting(const LimitCycle& cycle, const PhasePortrait& portrait);

struct LimitSetOptions {
  double tol = 1e-8;
  double t_max = 200.0;
  double cycle_match = 1e-4;
  double near_radius = 0.05;
  double polycycle_radius = 0.05;
  double connection_radius = 1e-4;
  int exclude_owner = -1;  // separatrix owner, ignored until the orbit has left its neighbourhood
  Polyline* record = nullptr;
};

LimitSetLabel classify_limit_set(const FieldFamily& family, const PhasePortrait& portrait, const Vec2& x0,
                                 TimeDirection direction, const LimitSetOptions& opts = {});

std::vector<Separatrix> trace_separatrices(const FieldFamily& family, const PhasePortrait& portrait,
                                           const PortraitOptions& opts = {});

enum class NonAndronovKind { non_hyperbolic_singular_point, non_hyperbolic_limit_cycle, saddle_connection };

std::string to_string(NonAndronovKind k);

struct NonAndronovElement {
  NonAndronovKind kind;
  std::vector<int> refs;  // point id / cycle id / (separatrix id, far-end point id)
  Polyline where;         // location samples, for matching against support sets
};

std::vector<NonAndronovElement> detect_non_andronov(const PhasePortrait& portrait);

struct SkeletonPiece {
  std::string kind;  // "singular-point" | "cycle" | "separatrix"
  int id;
  Polyline polyline;
};

std::vector<SkeletonPiece> skeleton(const PhasePortrait& portrait);

}  // namespace lbs

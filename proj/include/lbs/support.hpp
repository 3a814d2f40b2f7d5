#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lbs/portrait.hpp"

namespace lbs {

enum class Provenance { per, sep, sing, elbs_orbit };

std::string to_string(Provenance p);

struct TaggedPoint {
  Vec2 p;
  Provenance tag = Provenance::per;
};

/// Finite point cloud at resolution h, split into 3h single-linkage components.
struct SupportSet {
  double h = 0.01;
  std::vector<TaggedPoint> points;
  std::vector<int> component;  // per point
  int component_count = 0;
  std::vector<std::string> diagnostics;

  bool empty() const { return points.empty(); }
  std::vector<Vec2> coords() const;
  std::vector<Vec2> component_points(int c) const;
  double match_radius() const { return 3.0 * h; }
  void recompute_components();
};

/// Drops points closer than h/2 to an earlier kept point (keeps the first tag).
void thin_points(std::vector<TaggedPoint>& pts, double h);

struct SweepSample {
  ParamPoint eps;
  int shell = 0;
  bool ok = true;
  std::string error;
  std::vector<Vec2> per_points;
  std::vector<Vec2> sep_points;
};

struct SweepResult {
  std::vector<double> shells;  // strictly decreasing radii
  std::vector<SweepSample> samples;
};

/// Radii 0.05 * 5^-m down to the first one below h^2 (cycles born in a fold sit sqrt(rho) away).
std::vector<double> default_shells(double h);

/// Deterministic samples on the sup-norm sphere of radius rho.
std::vector<ParamPoint> shell_samples(std::size_t dim, double rho, int count);

struct SweepOptions {
  int samples_per_shell = 8;
  double spacing = 0.01;  // resampling of cycle and separatrix polylines
  PortraitOptions portrait;
};

SweepResult sweep(const FieldFamily& family, const std::vector<double>& shells, const SweepOptions& opts = {});

/// Grid nodes (spacing h) that stay within 3h of per/sep points at every shell.
SupportSet compute_acc(const SweepResult& sweep, const FieldFamily& family, double h);

struct ElbsOptions {
  int coarse_levels = 3;  // first pass on a 2^levels * h grid, refined where labels differ
  LimitSetOptions limits;
  PortraitOptions portrait;
};

struct ElbsResult {
  PhasePortrait portrait;
  SupportSet elbs;
  std::size_t classified_nodes = 0;
  std::size_t unresolved_nodes = 0;
};

ElbsResult compute_elbs(const FieldFamily& family, double h, const ElbsOptions& opts = {});

struct LbsOptions {
  ElbsOptions elbs;
  SweepOptions sweep;
  std::vector<double> shells;  // empty: default_shells(h)
};

struct LbsResult {
  PhasePortrait portrait;  // at eps = 0
  SupportSet elbs;
  SupportSet acc;
  SupportSet lbs;
  SupportSet lbs_star;
  SweepResult sweep;
};

LbsResult compute_lbs(const FieldFamily& family, double h, const LbsOptions& opts = {});

/// LBS minus non-interesting cycles and Andronov-Hopf points.
SupportSet compute_lbs_star(const SupportSet& lbs, const PhasePortrait& portrait);

struct CheckReport {
  std::string check;
  bool pass = false;
  bool inconclusive = false;
  double metric = 0.0;  // check-specific distance or count
  std::vector<std::string> notes;
};

CheckReport check_prop7(const SupportSet& lbs, const PhasePortrait& portrait);

/// Containment claims that hold by construction, plus the absence of hyperbolic
/// cycles, attractors and repellers.
CheckReport check_lbs_consistency(const LbsResult& r);

CheckReport check_stabilization_invariance(const FieldFamily& family, const CutFunction& phi, double h,
                                           const LbsOptions& opts = {});

CheckReport check_split_inclusion(const SplittingData& data, double h, const LbsOptions& opts = {});

}  // namespace lbs

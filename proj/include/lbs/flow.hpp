#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lbs/field_model.hpp"

namespace lbs {

enum class Terminal { time_limit, left_domain, converged_to_point, crossed_section };

std::string to_string(Terminal t);

struct TrajectorySample {
  double t;
  Vec2 p;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Terminal terminal = Terminal::time_limit;
  bool step_underflow = false;

  const Vec2& end() const { return samples.back().p; }
  double duration() const { return samples.back().t - samples.front().t; }
};

struct FlowOptions {
  double max_step = 0.1;       // time units
  double v_floor = 1e-9;
  double x_floor = 1e-8;
  bool stop_at_sinks = true;   // stop inside the linear basin of a hyperbolic sink (per time direction)
  bool record = true;
};

/// One accepted step with the continuous extension over [t0, t0 + h].
class StepView {
 public:
  double t0() const { return t0_; }
  double t1() const { return t0_ + h_; }
  const double* y0() const { return y0_; }
  const double* y1() const { return y1_; }
  /// Dense output at theta in [0, 1] for the first `n` state components.
  void interpolate(double theta, double* out, int n) const;

  // Filled by the driver.
  double t0_ = 0.0, h_ = 0.0;
  const double* y0_ = nullptr;
  const double* y1_ = nullptr;
  const double (*k_)[6] = nullptr;
};

/// Callback for every accepted step; return false to stop.
using StepCallback = std::function<bool(const StepView&)>;

struct RawRun {
  double t_end = 0.0;
  double y_end[6] = {0, 0, 1, 0, 0, 1};
  Terminal terminal = Terminal::time_limit;
  bool step_underflow = false;
  long steps = 0;
};

/// Low-level driver: Dormand-Prince 5(4) with dense output. With `variational`
/// the state carries Y (row-major 2x2) and solves Y' = J(x) Y with Y(0) = I.
RawRun run_flow(const FieldFamily& family, std::span<const double> eps, const Vec2& x0, double t_max, double tol,
                bool variational, const FlowOptions& opts, const StepCallback& on_step);

Trajectory integrate(const FieldFamily& family, const ParamPoint& eps, const Vec2& x0, double t_max, double tol,
                     const FlowOptions& opts = {});

struct ReturnSample {
  double s_in;
  double s_out;
  double flight_time;
  double dP;
  Vec2 hit;
};

struct ReturnOptions {
  double t_max = 200.0;
  bool backward = false;  // inverse return map: first crossing in backward time
  FlowOptions flow{0.1, 1e-9, 1e-8, false, false};
};

/// First same-orientation return to the section; throws NoReturn.
ReturnSample return_map(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s,
                        double tol, const ReturnOptions& opts = {});

/// Same, also recording the orbit polyline from the seed to the return.
ReturnSample return_map_orbit(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s,
                              double tol, Polyline& orbit, const ReturnOptions& opts = {});

/// Central difference (P(s + h) - P(s - h)) / 2h; cross-check for dP.
double return_map_fd(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s, double tol,
                     double h = 1e-5, const ReturnOptions& opts = {});

/// Checks the transversality invariant at section coordinate s.
bool section_transversal(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s);

struct FixedPoint {
  double s;
  double dP;
  double residual;  // P(s) - s
  bool tangency;    // found by the minimization branch
  bool from_inverse = false;
};

struct FixedPointScan {
  std::vector<FixedPoint> points;
  bool continuum_suspected = false;
};

struct FixedPointOptions {
  int nodes = 200;
  double tangency_floor = 1e-7;
  ReturnOptions ret;
  bool use_inverse = true;  // also scan the inverse map, which resolves strongly repelling cycles
};

FixedPointScan fixed_points_of_return(const FieldFamily& family, const ParamPoint& eps, const Section& section,
                                      double tol, const FixedPointOptions& opts = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lbs

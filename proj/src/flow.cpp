#include "lbs/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lbs {

namespace {

// Dormand-Prince 5(4).
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

// Dense output: y(t0 + theta h) = y0 + h sum_i k_i (P_i . [theta, theta^2, theta^3, theta^4]).
constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0}};

constexpr double kMinStep = 1e-14;
constexpr double kSinkCheckSpeed = 1e-4;
constexpr double kSinkRadius = 1e-4;

}  // namespace

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::time_limit: return "time-limit";
    case Terminal::left_domain: return "left-domain";
    case Terminal::converged_to_point: return "converged-to-point";
    case Terminal::crossed_section: return "crossed-section";
  }
  return "?";
}

void StepView::interpolate(double theta, double* out, int n) const {
  const double th = theta;
  const double pw[4] = {th, th * th, th * th * th, th * th * th * th};
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int s = 0; s < 7; ++s) {
      if (s == 1) continue;
      double b = 0.0;
      for (int j = 0; j < 4; ++j) b += P[s][j] * pw[j];
      acc += b * k_[s][i];
    }
    out[i] = y0_[i] + h_ * acc;
  }
}

namespace {

class Stepper {
 public:
  Stepper(const FieldFamily& family, std::span<const double> eps, double sign, bool variational)
      : family_(family), eps_(eps), sign_(sign), var_(variational), n_(variational ? 6 : 2) {}

  void rhs(const double* y, double* dy) const {
    const Vec2 p{y[0], y[1]};
    const Vec2 v = family_.eval_raw(eps_, p);
    dy[0] = sign_ * v.x;
    dy[1] = sign_ * v.y;
    if (var_) {
      const Mat2 J = family_.jacobian_raw(eps_, p);
      dy[2] = sign_ * (J.a * y[2] + J.b * y[4]);
      dy[3] = sign_ * (J.a * y[3] + J.b * y[5]);
      dy[4] = sign_ * (J.c * y[2] + J.d * y[4]);
      dy[5] = sign_ * (J.c * y[3] + J.d * y[5]);
    }
  }

  // Attempts a step of size h from (y, k[0] = f(y)). Returns the scaled error norm.
  double attempt(const double* y, double h, double tol) {
    double tmp[6];
    const int n = n_;
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * A21 * k_[0][i];
    rhs(tmp, k_[1]);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k_[0][i] + A32 * k_[1][i]);
    rhs(tmp, k_[2]);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (A41 * k_[0][i] + A42 * k_[1][i] + A43 * k_[2][i]);
    rhs(tmp, k_[3]);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (A51 * k_[0][i] + A52 * k_[1][i] + A53 * k_[2][i] + A54 * k_[3][i]);
    rhs(tmp, k_[4]);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (A61 * k_[0][i] + A62 * k_[1][i] + A63 * k_[2][i] + A64 * k_[3][i] + A65 * k_[4][i]);
    rhs(tmp, k_[5]);
    for (int i = 0; i < n; ++i)
      ynew_[i] = y[i] + h * (B1 * k_[0][i] + B3 * k_[2][i] + B4 * k_[3][i] + B5 * k_[4][i] + B6 * k_[5][i]);
    rhs(ynew_, k_[6]);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = h * (E1 * k_[0][i] + E3 * k_[2][i] + E4 * k_[3][i] + E5 * k_[4][i] + E6 * k_[5][i] +
                            E7 * k_[6][i]);
      const double sc = tol * std::max(1.0, std::max(std::abs(y[i]), std::abs(ynew_[i])));
      err = std::max(err, std::abs(e) / sc);
    }
    return err;
  }

  double k_[7][6] = {};
  double ynew_[6] = {};

 private:
  const FieldFamily& family_;
  std::span<const double> eps_;
  double sign_;
  bool var_;
  int n_;
};

// True when p lies within the linear basin of a hyperbolic sink of the field
// sign * v (so repellers count in backward time).
bool near_sink(const FieldFamily& family, std::span<const double> eps, const Vec2& p, double sign) {
  Vec2 q = p;
  for (int it = 0; it < 8; ++it) {
    const Vec2 v = family.eval_raw(eps, q);
    const Mat2 J = family.jacobian_raw(eps, q);
    const double det = J.det();
    if (det == 0.0) return false;
    const Vec2 step{(J.d * v.x - J.b * v.y) / det, (-J.c * v.x + J.a * v.y) / det};
    q -= step;
    if (norm(step) < 1e-14) break;
  }
  if (norm(family.eval_raw(eps, q)) > 1e-12 || distance(p, q) > kSinkRadius) return false;
  const auto ev = eigenvalues(family.jacobian_raw(eps, q));
  return sign * ev[0].real() <= -1e-6 && sign * ev[1].real() <= -1e-6;
}

}  // namespace

RawRun run_flow(const FieldFamily& family, std::span<const double> eps, const Vec2& x0, double t_max, double tol,
                bool variational, const FlowOptions& opts, const StepCallback& on_step) {
  if (t_max == 0.0) throw PreconditionError("t_max must be nonzero");
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  const double sign = t_max > 0.0 ? 1.0 : -1.0;
  const double horizon = std::abs(t_max);
  Stepper st(family, eps, sign, variational);
  const int n = variational ? 6 : 2;

  RawRun run;
  double y[6] = {x0.x, x0.y, 1.0, 0.0, 0.0, 1.0};
  double tau = 0.0;
  st.rhs(y, st.k_[0]);
  double h = std::min(opts.max_step, 1e-2);
  double anchor_tau = 0.0;
  Vec2 anchor = x0;

  StepView view;
  double yprev[6];
  while (tau < horizon) {
    if (h < kMinStep) {
      run.step_underflow = true;
      break;
    }
    bool last = false;
    if (tau + h >= horizon) {
      h = horizon - tau;
      last = true;
    }
    const double err = st.attempt(y, h, tol);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      continue;
    }
    std::copy(y, y + n, yprev);
    std::copy(st.ynew_, st.ynew_ + n, y);
    view.t0_ = sign * tau;
    view.h_ = sign * h;
    view.y0_ = yprev;
    view.y1_ = y;
    // k stages are in tau-time; convert to t-time for the dense output.
    double kt[7][6];
    for (int s = 0; s < 7; ++s)
      for (int i = 0; i < n; ++i) kt[s][i] = sign * st.k_[s][i];
    view.k_ = kt;
    tau = last ? horizon : tau + h;
    ++run.steps;

    const bool keep_going = on_step ? on_step(view) : true;
    // FSAL
    std::copy(st.k_[6], st.k_[6] + n, st.k_[0]);
    const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
    h = std::min(opts.max_step, h * fac);

    if (!keep_going) {
      run.terminal = Terminal::crossed_section;
      break;
    }
    const Vec2 p{y[0], y[1]};
    if (!family.contains(p)) {
      run.terminal = Terminal::left_domain;
      break;
    }
    const double speed = std::hypot(st.k_[0][0], st.k_[0][1]);
    if (tau - anchor_tau >= 1.0) {
      if (speed < opts.v_floor && distance(p, anchor) < opts.x_floor) {
        run.terminal = Terminal::converged_to_point;
        break;
      }
      anchor_tau = tau;
      anchor = p;
    }
    if (opts.stop_at_sinks && speed < kSinkCheckSpeed && near_sink(family, eps, p, sign)) {
      run.terminal = Terminal::converged_to_point;
      break;
    }
  }
  run.t_end = sign * tau;
  std::copy(y, y + n, run.y_end);
  return run;
}

Trajectory integrate(const FieldFamily& family, const ParamPoint& eps, const Vec2& x0, double t_max, double tol,
                     const FlowOptions& opts) {
  family.require_dim(eps);
  family.require_in_domain(x0);
  Trajectory traj;
  traj.samples.push_back({0.0, x0});
  const bool record = opts.record;
  const RawRun run = run_flow(family, eps.coords, x0, t_max, tol, false, opts, [&](const StepView& sv) {
    if (record) traj.samples.push_back({sv.t1(), {sv.y1()[0], sv.y1()[1]}});
    return true;
  });
  if (!record || traj.samples.back().t != run.t_end) traj.samples.push_back({run.t_end, {run.y_end[0], run.y_end[1]}});
  traj.terminal = run.terminal;
  traj.step_underflow = run.step_underflow;
  return traj;
}

bool section_transversal(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s) {
  const Vec2 v = family.eval_raw(eps.coords, section.point(s));
  const double vn = dot(v, section.normal());
  return section.orientation * vn > 0.0 && std::abs(vn) >= 1e-6 * norm(v);
}

namespace {

ReturnSample return_impl(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s,
                         double tol, Polyline* orbit, const ReturnOptions& opts) {
  family.require_dim(eps);
  const Vec2 x0 = section.point(s);
  const Vec2 v0 = family.eval_raw(eps.coords, x0);
  if (norm(v0) < opts.flow.v_floor) throw NoReturn("seed is a singular point");
  if (!section_transversal(family, eps, section, s)) {
    throw PreconditionError("field not transversal to the section at the seed");
  }
  const Vec2 nrm = section.normal();
  // Backward orbits cross in the opposite sense.
  const double orient = opts.backward ? -section.orientation : section.orientation;
  std::optional<ReturnSample> result;
  if (orbit) {
    orbit->clear();
    orbit->push_back(x0);
  }
  const double t_max = opts.backward ? -opts.t_max : opts.t_max;
  const RawRun run = run_flow(family, eps.coords, x0, t_max, tol, true, opts.flow, [&](const StepView& sv) {
    const Vec2 a{sv.y0()[0], sv.y0()[1]};
    const Vec2 b{sv.y1()[0], sv.y1()[1]};
    const double ga = orient * section.offset(a);
    const double gb = orient * section.offset(b);
    if (!(ga < 0.0 && gb >= 0.0)) {
      if (orbit) orbit->push_back(b);
      return true;
    }
    // Regula falsi (Illinois) on the dense output.
    double lo = 0.0, hi = 1.0, glo = ga, ghi = gb;
    double theta = 1.0;
    double buf[6];
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      theta = (glo * hi - ghi * lo) / (glo - ghi);
      if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
      sv.interpolate(theta, buf, 2);
      const double g = orient * section.offset({buf[0], buf[1]});
      if (std::abs(g) < 1e-15 || hi - lo < 1e-15) break;
      if (g < 0.0) {
        lo = theta;
        glo = g;
        if (side == -1) ghi *= 0.5;
        side = -1;
      } else {
        hi = theta;
        ghi = g;
        if (side == 1) glo *= 0.5;
        side = 1;
      }
    }
    sv.interpolate(theta, buf, 6);
    const Vec2 hit{buf[0], buf[1]};
    const double s_out = section.coordinate(hit);
    if (std::abs(s_out) > section.half_length) {
      if (orbit) orbit->push_back(b);
      return true;
    }
    const Vec2 v = family.eval_raw(eps.coords, hit);
    const Vec2 d = section.direction;
    const Vec2 yd{buf[2] * d.x + buf[3] * d.y, buf[4] * d.x + buf[5] * d.y};
    const double vn = dot(v, nrm);
    const double dP = dot(d, yd) - dot(d, v) * dot(nrm, yd) / vn;
    const double t_hit = sv.t0() + theta * (sv.t1() - sv.t0());
    if (orbit) orbit->push_back(hit);
    result = ReturnSample{s, s_out, t_hit, dP, hit};
    return false;
  });
  if (!result) {
    throw NoReturn("no return to the section (" + to_string(run.terminal) + " at t=" + std::to_string(run.t_end) +
                   ")");
  }
  return *result;
}

}  // namespace

ReturnSample return_map(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s,
                        double tol, const ReturnOptions& opts) {
  return return_impl(family, eps, section, s, tol, nullptr, opts);
}

ReturnSample return_map_orbit(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s,
                              double tol, Polyline& orbit, const ReturnOptions& opts) {
  return return_impl(family, eps, section, s, tol, &orbit, opts);
}

double return_map_fd(const FieldFamily& family, const ParamPoint& eps, const Section& section, double s, double tol,
                     double h, const ReturnOptions& opts) {
  const double up = return_map(family, eps, section, s + h, tol, opts).s_out;
  const double dn = return_map(family, eps, section, s - h, tol, opts).s_out;
  return (up - dn) / (2.0 * h);
}

namespace {

struct DirectionalScan {
  std::vector<std::pair<double, bool>> roots;  // (s, tangency)
  bool continuum = false;
};

using ScalarFn = std::function<double(double)>;

// Roots and near-tangencies of a displacement function sampled on `s`. With a
// mask, only brackets touching a masked node are examined.
DirectionalScan scan_displacement(const std::vector<double>& s, const std::vector<double>& d, const ScalarFn& disp,
                                  const ScalarFn& slope, double tol, const FixedPointOptions& opts,
                                  const std::vector<char>* mask = nullptr) {
  const int n = static_cast<int>(s.size());
  DirectionalScan scan;
  if (!mask) {
    int valid = 0, flat = 0;
    for (double di : d) {
      if (std::isnan(di)) continue;
      ++valid;
      if (std::abs(di) < opts.tangency_floor) ++flat;
    }
    if (valid >= 10 && 2 * flat >= valid) {
      scan.continuum = true;
      return scan;
    }
  }
  auto active = [&](int lo, int hi) {
    if (!mask) return true;
    for (int i = lo; i <= hi; ++i) {
      if ((*mask)[i]) return true;
    }
    return false;
  };

  auto& roots = scan.roots;
  for (int i = 0; i < n; ++i) {
    if (d[i] == 0.0 && active(i, i)) roots.push_back({s[i], false});
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (std::isnan(d[i]) || std::isnan(d[i + 1]) || d[i] == 0.0 || d[i + 1] == 0.0) continue;
    if ((d[i] < 0.0) == (d[i + 1] < 0.0) || !active(i, i + 1)) continue;
    double a = s[i], b = s[i + 1], da = d[i], db = d[i + 1];
    double x = 0.5 * (a + b);
    int side = 0;
    for (int it = 0; it < 80; ++it) {
      x = (da * b - db * a) / (da - db);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
      const double dx = disp(x);
      if (std::isnan(dx)) break;
      if (std::abs(dx) <= tol * 1e-2 || b - a < 1e-13) break;
      if ((dx < 0.0) == (da < 0.0)) {
        a = x;
        da = dx;
        if (side == -1) db *= 0.5;
        side = -1;
      } else {
        b = x;
        db = dx;
        if (side == 1) da *= 0.5;
        side = 1;
      }
    }
    roots.push_back({x, false});
  }
  // Near-tangencies: interior local minima of |P - id| without a sign change.
  for (int i = 1; i + 1 < n; ++i) {
    if (std::isnan(d[i - 1]) || std::isnan(d[i]) || std::isnan(d[i + 1])) continue;
    if ((d[i - 1] < 0.0) != (d[i] < 0.0) || (d[i] < 0.0) != (d[i + 1] < 0.0)) continue;
    if (!(std::abs(d[i]) < std::abs(d[i - 1]) && std::abs(d[i]) <= std::abs(d[i + 1]))) continue;
    if (d[i] == 0.0 || !active(i - 1, i + 1)) continue;
    // Golden-section search on (P - id)^2.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = s[i - 1], b = s[i + 1];
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = std::abs(disp(c)), fe = std::abs(disp(e));
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
      if (std::isnan(fc) || std::isnan(fe)) break;
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - gr * (b - a);
        fc = std::abs(disp(c));
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + gr * (b - a);
        fe = std::abs(disp(e));
      }
    }
    double x = fc < fe ? c : e;
    double fx = std::min(fc, fe);
    // The minimum of (P - id)^2 is where dP = 1; sharpen it with the variational derivative.
    double lo = x, hi = x, glo = slope(x), ghi = glo;
    for (double w = 1e-6; w < s[i + 1] - s[i - 1] && std::isfinite(glo) && (glo < 0.0) == (ghi < 0.0); w *= 4.0) {
      lo = std::max(s[i - 1], x - w);
      hi = std::min(s[i + 1], x + w);
      glo = slope(lo);
      ghi = slope(hi);
    }
    if (std::isfinite(glo) && std::isfinite(ghi) && (glo < 0.0) != (ghi < 0.0)) {
      double q = x;
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        q = (glo * hi - ghi * lo) / (glo - ghi);
        if (!(q > lo && q < hi)) q = 0.5 * (lo + hi);
        const double gq = slope(q);
        if (!std::isfinite(gq) || gq == 0.0) break;
        if ((gq < 0.0) == (glo < 0.0)) {
          lo = q;
          glo = gq;
          ghi *= 0.5;
        } else {
          hi = q;
          ghi = gq;
          glo *= 0.5;
        }
      }
      const double fq = std::abs(disp(q));
      if (fq <= fx || fq < opts.tangency_floor) {
        x = q;
        fx = fq;
      }
    }
    if (fx < opts.tangency_floor) roots.push_back({x, true});
  }
  return scan;
}

}  // namespace

FixedPointScan fixed_points_of_return(const FieldFamily& family, const ParamPoint& eps, const Section& section,
                                      double tol, const FixedPointOptions& opts) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ReturnOptions fwd = opts.ret, bwd = opts.ret;
  fwd.backward = false;
  bwd.backward = true;
  auto call = [&](double s, const ReturnOptions& r) -> std::optional<ReturnSample> {
    try {
      return return_map(family, eps, section, s, tol, r);
    } catch (const NoReturn&) {
    } catch (const PreconditionError&) {
    }
    return std::nullopt;
  };
  auto disp_f = [&](double s) {
    const auto r = call(s, fwd);
    return r ? r->s_out - s : nan;
  };
  auto disp_b = [&](double s) {
    const auto r = call(s, bwd);
    return r ? r->s_out - s : nan;
  };
  auto slope_f = [&](double s) {
    const auto r = call(s, fwd);
    return r ? r->dP - 1.0 : nan;
  };
  auto slope_b = [&](double s) {
    const auto r = call(s, bwd);
    return r ? r->dP - 1.0 : nan;
  };
  // Forward where the orbit returns, otherwise minus the inverse displacement
  // (same sign as the forward one); glues a tangency whose two sides return in
  // opposite time directions.
  auto disp_m = [&](double s) {
    const double d = disp_f(s);
    return std::isnan(d) ? -disp_b(s) : d;
  };
  auto slope_m = [&](double s) {
    const auto r = call(s, fwd);
    if (r) return r->dP - 1.0;
    const auto q = call(s, bwd);
    return q ? 1.0 - q->dP : nan;
  };

  const int n = std::max(opts.nodes, 3);
  std::vector<double> s(n), df(n), db(n, nan);
  for (int i = 0; i < n; ++i) {
    s[i] = -section.half_length + 2.0 * section.half_length * i / (n - 1);
    df[i] = disp_f(s[i]);
  }
  FixedPointScan out;
  const DirectionalScan a = scan_displacement(s, df, disp_f, slope_f, tol, opts);
  if (a.continuum) {
    out.continuum_suspected = true;
    return out;
  }
  std::vector<std::pair<double, int>> candidates;  // (s, 0 forward | 1 inverse | 2 glued) with tangency bit 4
  for (const auto& [x, t] : a.roots) candidates.push_back({x, 0 | (t ? 4 : 0)});
  if (opts.use_inverse) {
    for (int i = 0; i < n; ++i) db[i] = disp_b(s[i]);
    const DirectionalScan b = scan_displacement(s, db, disp_b, slope_b, tol, opts);
    for (const auto& [x, t] : b.roots) candidates.push_back({x, 1 | (t ? 4 : 0)});
    std::vector<double> dm(n);
    std::vector<char> mixed(n, 0);
    for (int i = 0; i < n; ++i) {
      if (std::isnan(df[i]) && !std::isnan(db[i])) {
        dm[i] = -db[i];
        mixed[i] = 1;
      } else {
        dm[i] = df[i];
      }
    }
    const DirectionalScan m = scan_displacement(s, dm, disp_m, slope_m, tol, opts, &mixed);
    for (const auto& [x, t] : m.roots) candidates.push_back({x, 2 | (t ? 4 : 0)});
  }

  std::vector<FixedPoint> all;
  for (const auto& [x, code] : candidates) {
    const bool tangent = (code & 4) != 0;
    const int kind = code & 3;
    // Glued candidates use whichever direction returns.
    const std::vector<bool> dirs = kind == 0 ? std::vector<bool>{false}
                                   : kind == 1 ? std::vector<bool>{true}
                                               : std::vector<bool>{false, true};
    for (bool backward : dirs) {
      const auto r = call(x, backward ? bwd : fwd);
      // Steep expanding maps look like jumps; their roots come from the other direction.
      if (!r || std::abs(r->s_out - x) > 1e-6) continue;
      // Return maps of a planar flow are increasing; a negative value is round-off below 1e-16.
      const double m = std::abs(r->dP);
      FixedPoint p{x, backward ? 1.0 / m : m, r->s_out - x, tangent, backward};
      all.push_back(p);
      break;
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const FixedPoint& x, const FixedPoint& y) { return x.s < y.s; });
  for (const auto& p : all) {
    if (!out.points.empty() && std::abs(out.points.back().s - p.s) < 1e-6) {
      // Keep the estimate from the contracting direction.
      auto contracting = [](const FixedPoint& q) { return q.from_inverse ? std::abs(q.dP) > 1.0 : std::abs(q.dP) <= 1.0; };
      if ((contracting(p) && !contracting(out.points.back())) || (p.tangency && !out.points.back().tangency)) {
        out.points.back() = p;
      }
      continue;
    }
    out.points.push_back(p);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y\n";
  char line[96];
  for (const auto& smp : traj.samples) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", smp.t, smp.p.x, smp.p.y);
    os << line;
  }
}

}  // namespace lbs

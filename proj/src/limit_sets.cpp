#include <algorithm>
#include <cmath>
#include <map>

#include "lbs/portrait.hpp"

namespace lbs {

std::string to_string(LabelKind k) {
  switch (k) {
    case LabelKind::singular_point: return "singular-point";
    case LabelKind::limit_cycle: return "limit-cycle";
    case LabelKind::polycycle: return "polycycle";
    case LabelKind::boundary_exit: return "boundary-exit";
    case LabelKind::unresolved: return "unresolved";
  }
  return "?";
}

std::string to_string(NonAndronovKind k) {
  switch (k) {
    case NonAndronovKind::non_hyperbolic_singular_point: return "non-hyperbolic-singular-point";
    case NonAndronovKind::non_hyperbolic_limit_cycle: return "non-hyperbolic-limit-cycle";
    case NonAndronovKind::saddle_connection: return "saddle-connection";
  }
  return "?";
}

namespace {

constexpr double kCenterOffset = 1e-2;

LimitSetLabel point_label(const PhasePortrait& pp, int id) {
  const auto& sp = pp.singular_points[id];
  return {LabelKind::singular_point, id, !(sp.attractor() || sp.repeller())};
}

// Eigenvector along which orbits approach a saddle in the given time direction.
Vec2 incoming_direction(const FieldFamily& f, const ParamPoint& e, const SingularPoint& sp, double sign) {
  const Mat2 J = f.jacobian_raw(e.coords, sp.location);
  const double lam = sign > 0 ? sp.eigenvalues[0].real() : sp.eigenvalues[1].real();
  return eigenvector(J, lam);
}

struct SectionTrack {
  std::vector<std::pair<double, int>> fixed;  // (s*, cycle id), ascending
  std::vector<double> crossings;
  int low_anchor = -1;   // singular point near the s = -half end
  int high_anchor = -1;  // singular point near the s = +half end
  int still = 0;         // consecutive crossings without drift
};

}  // namespace

LimitSetLabel classify_limit_set(const FieldFamily& family, const PhasePortrait& pp, const Vec2& x0,
                                 TimeDirection direction, const LimitSetOptions& opts) {
  family.require_in_domain(x0);
  const double sign = direction == TimeDirection::omega ? 1.0 : -1.0;
  const ParamPoint& eps = pp.eps;
  if (opts.record) {
    opts.record->clear();
    opts.record->push_back(x0);
  }

  for (const auto& sp : pp.singular_points) {
    if (distance(sp.location, x0) < 1e-9 && sp.id != opts.exclude_owner) return point_label(pp, sp.id);
  }

  const auto& sections = family.sections();
  std::vector<SectionTrack> tracks(sections.size());
  for (std::size_t k = 0; k < sections.size(); ++k) {
    for (const auto& c : pp.cycles) {
      if (c.section_index == static_cast<int>(k)) tracks[k].fixed.push_back({c.s, c.id});
    }
    std::sort(tracks[k].fixed.begin(), tracks[k].fixed.end());
    const Section& sec = sections[k];
    const double reach = 0.2 * sec.half_length;
    double best_lo = reach, best_hi = reach;
    for (const auto& sp : pp.singular_points) {
      const double dlo = distance(sp.location, sec.point(-sec.half_length));
      const double dhi = distance(sp.location, sec.point(sec.half_length));
      if (dlo < best_lo) {
        best_lo = dlo;
        tracks[k].low_anchor = sp.id;
      }
      if (dhi < best_hi) {
        best_hi = dhi;
        tracks[k].high_anchor = sp.id;
      }
    }
  }

  struct Near {
    double start = -1.0;
    double first = 0.0;
    double last = INFINITY;
  };
  std::vector<Near> near(pp.singular_points.size());
  std::vector<Vec2> incoming(pp.singular_points.size());
  for (const auto& sp : pp.singular_points) {
    if (sp.cls == PointClass::hyperbolic_saddle) incoming[sp.id] = incoming_direction(family, eps, sp, sign);
  }
  bool owner_left = opts.exclude_owner < 0;

  // Polycycle bookkeeping: time inside saddle balls and entries per saddle.
  struct Visit {
    double t;
    int saddle;  // -1 when outside every ball
  };
  std::vector<Visit> visits;
  int current_ball = -1;
  std::map<int, int> ball_entries;
  double next_poly_check = 50.0;

  std::optional<LimitSetLabel> label;
  FlowOptions fo;
  fo.record = false;
  fo.stop_at_sinks = true;

  auto polycycle_check = [&](double t_now) -> std::optional<LimitSetLabel> {
    const double from = 0.5 * t_now;
    double inside_time = 0.0;
    std::map<int, int> entries;
    for (std::size_t i = 1; i < visits.size(); ++i) {
      if (visits[i].t < from) continue;
      const double dt = visits[i].t - std::max(visits[i - 1].t, from);
      if (visits[i].saddle >= 0) {
        inside_time += dt;
        if (visits[i - 1].saddle != visits[i].saddle) entries[visits[i].saddle]++;
      }
    }
    if (inside_time <= 0.5 * (t_now - from)) return std::nullopt;
    int best = -1, best_entries = 0;
    for (const auto& [id, cnt] : entries) {
      if (cnt > best_entries) {
        best = id;
        best_entries = cnt;
      }
    }
    if (best < 0 || best_entries < 3) return std::nullopt;
    return LimitSetLabel{LabelKind::polycycle, best, true};
  };

  const RawRun run = run_flow(family, eps.coords, x0, sign * opts.t_max, opts.tol, false, fo, [&](const StepView& sv) {
    const Vec2 a{sv.y0()[0], sv.y0()[1]};
    const Vec2 b{sv.y1()[0], sv.y1()[1]};
    const double t = std::abs(sv.t1());
    if (opts.record) opts.record->push_back(b);

    // Section crossings in the direction of integration.
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const Section& sec = sections[k];
      const double orient = sign * sec.orientation;
      const double ga = orient * sec.offset(a), gb = orient * sec.offset(b);
      if (!(ga < 0.0 && gb >= 0.0)) continue;
      double lo = 0.0, hi = 1.0, glo = ga, ghi = gb, theta = 1.0, buf[2];
      for (int it = 0; it < 40; ++it) {
        theta = (glo * hi - ghi * lo) / (glo - ghi);
        if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
        sv.interpolate(theta, buf, 2);
        const double g = orient * sec.offset({buf[0], buf[1]});
        if (std::abs(g) < 1e-14) break;
        if (g < 0.0) {
          lo = theta;
          glo = g;
        } else {
          hi = theta;
          ghi = g;
        }
      }
      const double c = sec.coordinate({buf[0], buf[1]});
      if (std::abs(c) > sec.half_length) continue;
      auto& tr = tracks[k];
      tr.crossings.push_back(c);
      const std::size_t m = tr.crossings.size();
      for (const auto& [s_star, id] : tr.fixed) {
        if (std::abs(c - s_star) < opts.cycle_match && m >= 2 &&
            std::abs(c - s_star) <= std::abs(tr.crossings[m - 2] - s_star)) {
          label = LimitSetLabel{LabelKind::limit_cycle, id, pp.cycles[id].interesting};
          return false;
        }
      }
      if (m < 2) continue;
      // The return map is increasing: a monotone pair of crossings converges to
      // the first fixed point ahead of it.
      const double prev = tr.crossings[m - 2];
      const double step = c - prev;
      if (std::abs(step) <= 100.0 * opts.tol) {
        // No drift along the section: a closed orbit, or a very slow approach to a known cycle.
        for (const auto& [s_star, id] : tr.fixed) {
          if (std::abs(c - s_star) < 1e-3) {
            label = LimitSetLabel{LabelKind::limit_cycle, id, pp.cycles[id].interesting};
            return false;
          }
        }
        if (++tr.still >= 2) {
          label = LimitSetLabel{};
          return false;
        }
        continue;
      }
      tr.still = 0;
      bool between = false;
      for (const auto& fx : tr.fixed) {
        if ((fx.first - prev) * (fx.first - c) <= 0.0) between = true;
      }
      if (between) continue;
      int target = -1;
      double best = INFINITY;
      for (const auto& [s_star, id] : tr.fixed) {
        const double ahead = (s_star - c) * (step > 0 ? 1.0 : -1.0);
        if (ahead > 0.0 && ahead < best) {
          best = ahead;
          target = id;
        }
      }
      if (target >= 0) {
        label = LimitSetLabel{LabelKind::limit_cycle, target, pp.cycles[target].interesting};
        return false;
      }
      const int anchor = step < 0 ? tr.low_anchor : tr.high_anchor;
      if (anchor >= 0 && pp.singular_points[anchor].cls != PointClass::hyperbolic_saddle) {
        label = point_label(pp, anchor);
        return false;
      }
    }

    int ball = -1;
    for (const auto& sp : pp.singular_points) {
      const double d = distance(b, sp.location);
      if (sp.id == opts.exclude_owner && !owner_left) {
        if (d > 100.0 * opts.connection_radius) owner_left = true;
        continue;
      }
      if (sp.cls == PointClass::hyperbolic_saddle) {
        if (d < opts.polycycle_radius) ball = sp.id;
        // Arrival along the incoming eigendirection: a connection.
        if (d < opts.connection_radius && std::abs(cross(b - sp.location, incoming[sp.id])) < 0.2 * d) {
          if (opts.exclude_owner >= 0) {
            label = sp.id == opts.exclude_owner ? LimitSetLabel{LabelKind::polycycle, sp.id, true} : point_label(pp, sp.id);
            return false;
          }
          // A generic orbit does not end at a saddle; a recurrent close pass means a polycycle.
          if (ball_entries[sp.id] >= 2) {
            label = LimitSetLabel{LabelKind::polycycle, sp.id, true};
            return false;
          }
        }
        continue;
      }
      // Monotone approach to a non-saddle point for at least one time unit.
      auto& nr = near[sp.id];
      if (d < opts.near_radius && d < nr.last) {
        if (nr.start < 0.0) {
          nr.start = t;
          nr.first = d;
        }
        nr.last = d;
        // Integration noise on a closed orbit must not count as an approach.
        if (t - nr.start >= 1.0 && nr.first - d > 1e-6) {
          label = point_label(pp, sp.id);
          return false;
        }
      } else {
        nr.start = -1.0;
        nr.last = d < opts.near_radius ? d : INFINITY;
      }
    }
    if (visits.empty()) visits.push_back({0.0, current_ball});
    visits.push_back({t, ball});
    if (ball >= 0 && ball != current_ball) ball_entries[ball]++;
    current_ball = ball;
    if (t >= next_poly_check) {
      next_poly_check += 50.0;
      if (auto pl = polycycle_check(t)) {
        label = pl;
        return false;
      }
    }
    return true;
  });

  if (label) return *label;
  switch (run.terminal) {
    case Terminal::left_domain: return {LabelKind::boundary_exit, -1, false};
    case Terminal::converged_to_point: {
      const Vec2 end{run.y_end[0], run.y_end[1]};
      for (const auto& sp : pp.singular_points) {
        if (distance(end, sp.location) < 1e-3) return point_label(pp, sp.id);
      }
      return {};
    }
    default: break;
  }
  if (auto pl = polycycle_check(std::abs(run.t_end))) return *pl;
  return {};
}

std::vector<Separatrix> trace_separatrices(const FieldFamily& family, const PhasePortrait& pp,
                                           const PortraitOptions& opts) {
  std::vector<Separatrix> out;
  LimitSetOptions lo;
  lo.tol = std::max(opts.tol, 1e-10);
  lo.t_max = opts.t_max;
  lo.connection_radius = opts.connection_radius;
  auto add = [&](const SingularPoint& sp, const Vec2& dir, bool stable, int side, bool center) {
    // Center-manifold orbits leave only algebraically; start them further out.
    const double offset = center ? std::max(opts.sep_offset, kCenterOffset) : opts.sep_offset;
    Separatrix s;
    s.owner = sp.id;
    s.stable = stable;
    s.side = side;
    s.center_branch = center;
    const Vec2 seed = sp.location + offset * dir;
    if (!family.contains(seed)) return;
    LimitSetOptions o = lo;
    o.exclude_owner = sp.id;
    o.record = &s.polyline;
    const LimitSetLabel own = point_label(pp, sp.id);
    if (stable) {
      s.alpha = classify_limit_set(family, pp, seed, TimeDirection::alpha, o);
      s.omega = own;
    } else {
      s.omega = classify_limit_set(family, pp, seed, TimeDirection::omega, o);
      s.alpha = own;
    }
    s.polyline.insert(s.polyline.begin(), sp.location);
    s.id = static_cast<int>(out.size());
    out.push_back(std::move(s));
  };
  for (const auto& sp : pp.singular_points) {
    const Mat2 J = family.jacobian_raw(pp.eps.coords, sp.location);
    if (sp.cls == PointClass::hyperbolic_saddle) {
      const Vec2 es = eigenvector(J, sp.eigenvalues[0].real());
      const Vec2 eu = eigenvector(J, sp.eigenvalues[1].real());
      add(sp, eu, false, 1, false);
      add(sp, -eu, false, -1, false);
      add(sp, es, true, 1, false);
      add(sp, -es, true, -1, false);
    } else if (sp.cls == PointClass::saddle_node && sp.sn_coefficient) {
      const bool zero0 = std::abs(sp.eigenvalues[0].real()) < std::abs(sp.eigenvalues[1].real());
      const double lc = zero0 ? sp.eigenvalues[0].real() : sp.eigenvalues[1].real();
      const double lh = zero0 ? sp.eigenvalues[1].real() : sp.eigenvalues[0].real();
      const Vec2 ec = eigenvector(J, lc);
      const Vec2 eh = eigenvector(J, lh);
      const bool hyp_stable = lh < 0.0;
      add(sp, eh, hyp_stable, 1, false);
      add(sp, -eh, hyp_stable, -1, false);
      // Center flow u' = a u^2: forward orbits leave on the side sign(a).
      const double a = *sp.sn_coefficient;
      const Vec2 away = (a > 0 ? 1.0 : -1.0) * ec;
      if (hyp_stable) {
        add(sp, away, false, 1, true);
      } else {
        add(sp, -away, true, 1, true);
      }
    }
  }
  return out;
}

std::vector<NonAndronovElement> detect_non_andronov(const PhasePortrait& pp) {
  std::vector<NonAndronovElement> out;
  for (const auto& sp : pp.singular_points) {
    if (!sp.hyperbolic) out.push_back({NonAndronovKind::non_hyperbolic_singular_point, {sp.id}, {sp.location}});
  }
  for (const auto& c : pp.cycles) {
    if (c.multiplicity != 1 || std::abs(c.multiplier - 1.0) < kHyperbolicityFloor) {
      out.push_back({NonAndronovKind::non_hyperbolic_limit_cycle, {c.id}, c.polyline});
    }
  }
  std::vector<std::pair<std::pair<int, int>, Polyline>> seen;
  for (const auto& s : pp.separatrices) {
    const LimitSetLabel& far = s.stable ? s.alpha : s.omega;
    int target = -1;
    if (far.kind == LabelKind::polycycle && far.target_id == s.owner) target = s.owner;
    if (far.kind == LabelKind::singular_point && far.target_id >= 0 &&
        pp.singular_points[far.target_id].has_hyperbolic_sector() && far.target_id != s.owner) {
      target = far.target_id;
    }
    if (target < 0) continue;
    const std::pair<int, int> key{std::min(s.owner, target), std::max(s.owner, target)};
    const Polyline fine = resample(s.polyline, 1e-3);
    const Vec2 mid = fine[fine.size() / 2];
    bool dup = false;
    for (const auto& [k, poly] : seen) {
      if (k != key) continue;
      double best = INFINITY;
      for (const auto& q : poly) best = std::min(best, distance(q, mid));
      if (best < 1e-2) dup = true;
    }
    if (dup) continue;
    seen.push_back({key, fine});
    out.push_back({NonAndronovKind::saddle_connection, {s.id, target}, s.polyline});
  }
  return out;
}

std::vector<SkeletonPiece> skeleton(const PhasePortrait& pp) {
  std::vector<SkeletonPiece> out;
  for (const auto& sp : pp.singular_points) out.push_back({"singular-point", sp.id, {sp.location}});
  for (const auto& c : pp.cycles) out.push_back({"cycle", c.id, c.polyline});
  for (const auto& s : pp.separatrices) out.push_back({"separatrix", s.id, s.polyline});
  return out;
}

}  // namespace lbs

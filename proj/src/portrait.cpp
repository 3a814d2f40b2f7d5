#include "lbs/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace lbs {

namespace {

using cplx = std::complex<double>;
using CVec = std::array<cplx, 2>;

Vec2 field(const FieldFamily& f, const ParamPoint& e, const Vec2& p) { return f.eval_raw(e.coords, p); }

// Second-order term B(x, y) of the Taylor expansion at p.
Vec2 bilinear(const FieldFamily& f, const ParamPoint& e, const Vec2& p, const Vec2& x, const Vec2& y) {
  const double h = 1e-4;
  const Vec2 u = h * (x + y), v = h * (x - y);
  return (field(f, e, p + u) - field(f, e, p + v) - field(f, e, p - v) + field(f, e, p - u)) * (1.0 / (4 * h * h));
}

// Cubic term C(u, u, u).
Vec2 cubic_diag(const FieldFamily& f, const ParamPoint& e, const Vec2& p, const Vec2& u) {
  const double h = 1e-3;
  return (field(f, e, p + 2 * h * u) - 2.0 * field(f, e, p + h * u) + 2.0 * field(f, e, p - h * u) -
          field(f, e, p - 2 * h * u)) *
         (1.0 / (2 * h * h * h));
}

CVec bilinear_c(const FieldFamily& f, const ParamPoint& e, const Vec2& p, const CVec& x, const CVec& y) {
  const Vec2 a{x[0].real(), x[1].real()}, b{x[0].imag(), x[1].imag()};
  const Vec2 c{y[0].real(), y[1].real()}, d{y[0].imag(), y[1].imag()};
  const Vec2 re = bilinear(f, e, p, a, c) - bilinear(f, e, p, b, d);
  const Vec2 im = bilinear(f, e, p, a, d) + bilinear(f, e, p, b, c);
  return {cplx(re.x, im.x), cplx(re.y, im.y)};
}

cplx inner(const CVec& p, const CVec& q) { return std::conj(p[0]) * q[0] + std::conj(p[1]) * q[1]; }

}  // namespace

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::hyperbolic_saddle: return "hyperbolic-saddle";
    case PointClass::hyperbolic_node: return "hyperbolic-node";
    case PointClass::hyperbolic_focus: return "hyperbolic-focus";
    case PointClass::saddle_node: return "saddle-node";
    case PointClass::andronov_hopf: return "andronov-hopf";
    case PointClass::degenerate_other: return "degenerate-other";
  }
  return "?";
}

std::string to_string(CycleStability s) {
  switch (s) {
    case CycleStability::attracting: return "attracting";
    case CycleStability::repelling: return "repelling";
    case CycleStability::semi_stable_outer_attracting: return "semi-stable-outer-attracting";
    case CycleStability::semi_stable_inner_attracting: return "semi-stable-inner-attracting";
    case CycleStability::unresolved: return "unresolved";
  }
  return "?";
}

bool SingularPoint::attractor() const {
  return hyperbolic && eigenvalues[0].real() < 0.0 && eigenvalues[1].real() < 0.0;
}

bool SingularPoint::repeller() const {
  return hyperbolic && eigenvalues[0].real() > 0.0 && eigenvalues[1].real() > 0.0;
}

double first_lyapunov_value(const FieldFamily& family, const ParamPoint& eps, const Vec2& p) {
  const Mat2 A = family.jacobian_raw(eps.coords, p);
  const double det = A.det();
  if (!(det > 0.0)) throw PreconditionError("first Lyapunov value needs a pure imaginary pair");
  const double w = std::sqrt(det);
  const cplx I(0.0, 1.0);
  // A q = i w q, A^T p = -i w p, <p, q> = 1.
  CVec q = std::abs(A.b) >= std::abs(A.c) ? CVec{cplx(A.b), I * w - A.a} : CVec{I * w - A.d, cplx(A.c)};
  const double qn = std::sqrt(std::norm(q[0]) + std::norm(q[1]));
  q = {q[0] / qn, q[1] / qn};
  CVec pv = std::abs(A.c) >= std::abs(A.b) ? CVec{cplx(A.c), -(A.a + I * w)} : CVec{A.d + I * w, cplx(-A.b)};
  const cplx pq = inner(pv, q);
  pv = {pv[0] / std::conj(pq), pv[1] / std::conj(pq)};

  const Vec2 a{q[0].real(), q[1].real()}, b{q[0].imag(), q[1].imag()};
  const CVec qbar{std::conj(q[0]), std::conj(q[1])};

  // C(q, q, qbar) from diagonal cubic terms by polarization.
  auto T = [&](const Vec2& u) { return cubic_diag(family, eps, p, u); };
  const Vec2 Taa = T(a), Tbb = T(b), Tp = T(a + b), Tm = T(a - b);
  const Vec2 Cabb = (Tp + Tm - 2.0 * Taa) * (1.0 / 6.0);
  const Vec2 Caab = (Tp - Tm - 2.0 * Tbb) * (1.0 / 6.0);
  const CVec Cqqq{cplx(Taa.x + Cabb.x, Caab.x + Tbb.x), cplx(Taa.y + Cabb.y, Caab.y + Tbb.y)};

  // A^{-1} B(q, qbar), real.
  const Vec2 Bqqb = bilinear(family, eps, p, a, a) + bilinear(family, eps, p, b, b);
  const Vec2 r{(A.d * Bqqb.x - A.b * Bqqb.y) / det, (-A.c * Bqqb.x + A.a * Bqqb.y) / det};
  const CVec term2 = bilinear_c(family, eps, p, q, CVec{cplx(r.x), cplx(r.y)});

  // (2 i w - A)^{-1} B(q, q).
  const CVec Bqq = bilinear_c(family, eps, p, q, q);
  const cplx m11 = 2.0 * I * w - A.a, m12 = -A.b, m21 = -A.c, m22 = 2.0 * I * w - A.d;
  const cplx md = m11 * m22 - m12 * m21;
  const CVec z{(m22 * Bqq[0] - m12 * Bqq[1]) / md, (-m21 * Bqq[0] + m11 * Bqq[1]) / md};
  const CVec term3 = bilinear_c(family, eps, p, qbar, z);

  const cplx total = inner(pv, Cqqq) - 2.0 * inner(pv, term2) + inner(pv, term3);
  return total.real() / (2.0 * w);
}

SingularPoint classify_singular_point(const FieldFamily& family, const ParamPoint& eps, const Vec2& p, double floor) {
  SingularPoint sp;
  sp.location = p;
  const Mat2 J = family.jacobian_raw(eps.coords, p);
  sp.eigenvalues = eigenvalues(J);
  const double re0 = sp.eigenvalues[0].real(), re1 = sp.eigenvalues[1].real();
  const double im = std::abs(sp.eigenvalues[0].imag());
  const bool complex_pair = im > 0.0;
  const double min_re = std::min(std::abs(re0), std::abs(re1));
  sp.hyperbolic = min_re >= floor;
  sp.borderline = min_re >= 0.1 * floor && min_re <= 10.0 * floor;
  if (sp.hyperbolic) {
    if (!complex_pair && re0 * re1 < 0.0) {
      sp.cls = PointClass::hyperbolic_saddle;
    } else if (complex_pair) {
      sp.cls = PointClass::hyperbolic_focus;
    } else {
      sp.cls = PointClass::hyperbolic_node;
    }
    return sp;
  }
  if (complex_pair && im >= floor) {
    const double l1 = first_lyapunov_value(family, eps, p);
    if (std::abs(l1) > floor) {
      sp.cls = PointClass::andronov_hopf;
      sp.lyapunov1 = l1;
    }
    return sp;
  }
  if (!complex_pair) {
    const bool zero0 = std::abs(re0) < floor;
    const double lc = zero0 ? re0 : re1;
    const double lo = zero0 ? re1 : re0;
    if (std::abs(lo) >= floor) {
      // Center direction e, left eigenvector w with w.e = 1; a = w . B(e, e) / 2.
      const Vec2 e = eigenvector(J, lc);
      const Mat2 Jt{J.a, J.c, J.b, J.d};
      Vec2 w = eigenvector(Jt, lc);
      w *= 1.0 / dot(w, e);
      const double a = 0.5 * dot(w, bilinear(family, eps, p, e, e));
      sp.sn_coefficient = a;
      if (std::abs(a) > floor) sp.cls = PointClass::saddle_node;
    }
  }
  return sp;
}

std::vector<SingularPoint> find_singular_points(const FieldFamily& family, const ParamPoint& eps, int seeds_per_axis,
                                                std::vector<std::string>* diagnostics, double floor) {
  if (seeds_per_axis < 8) throw PreconditionError("seeds_per_axis must be at least 8");
  family.require_dim(eps);
  const Rect b = family.domain().region.bounds();
  const double diag = std::hypot(b.x_max - b.x_min, b.y_max - b.y_min);
  struct Found {
    Vec2 p;
    double residual;
  };
  std::vector<Found> found;
  int stalled = 0;
  const int n = seeds_per_axis;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec2 p{b.x_min + (b.x_max - b.x_min) * (i + 0.5) / n, b.y_min + (b.y_max - b.y_min) * (j + 0.5) / n};
      if (!family.contains(p)) continue;
      // Plain Newton; degenerate roots converge linearly, hence the generous iteration cap.
      bool ok = true;
      for (int it = 0; it < 120; ++it) {
        const Vec2 v = field(family, eps, p);
        if (v.x == 0.0 && v.y == 0.0) break;
        const Mat2 J = family.jacobian_raw(eps.coords, p);
        const double det = J.det();
        if (det == 0.0 || !std::isfinite(det)) {
          ok = false;
          break;
        }
        Vec2 step{(J.d * v.x - J.b * v.y) / det, (-J.c * v.x + J.a * v.y) / det};
        const double sn = norm(step);
        if (sn > 0.25 * diag) step *= 0.25 * diag / sn;
        p -= step;
        if (!family.contains(p)) {
          ok = false;
          break;
        }
        if (sn < 1e-15 * (1.0 + norm(p))) break;
      }
      const double res = ok ? norm(field(family, eps, p)) : INFINITY;
      if (!(res <= 1e-10)) {
        ++stalled;
        continue;
      }
      bool dup = false;
      for (auto& f : found) {
        if (distance(f.p, p) < 1e-6) {
          if (res < f.residual) f = {p, res};
          dup = true;
          break;
        }
      }
      if (!dup) found.push_back({p, res});
    }
  }
  if (diagnostics && stalled > 0) {
    diagnostics->push_back("newton: " + std::to_string(stalled) + " seeds stalled or left the domain");
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& c) {
    return a.p.x != c.p.x ? a.p.x < c.p.x : a.p.y < c.p.y;
  });
  std::vector<SingularPoint> out;
  for (const auto& f : found) {
    SingularPoint sp = classify_singular_point(family, eps, f.p, floor);
    sp.id = static_cast<int>(out.size());
    out.push_back(sp);
  }
  return out;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double l2 = dot(d, d);
  const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  return distance(p, a + t * d);
}

double distance_to_polyline(const Vec2& p, const Polyline& poly) {
  double best = INFINITY;
  for (std::size_t i = 1; i < poly.size(); ++i) best = std::min(best, point_segment_distance(p, poly[i - 1], poly[i]));
  if (poly.size() == 1) best = distance(p, poly[0]);
  return best;
}

bool same_curve(const Polyline& a, const Polyline& b, double tol) {
  for (const auto& p : a)
    if (distance_to_polyline(p, b) >= tol) return false;
  for (const auto& p : b)
    if (distance_to_polyline(p, a) >= tol) return false;
  return true;
}

// Multiplier of the forward map at s, preferring `ret`'s direction and falling
// back to the other one when that orbit does not return.
double forward_dP(const FieldFamily& f, const ParamPoint& e, const Section& sec, double s, double tol,
                  const ReturnOptions& ret) {
  ReturnOptions r = ret;
  for (int k = 0; k < 2; ++k, r.backward = !r.backward) {
    try {
      const double d = return_map(f, e, sec, s, tol, r).dP;
      return r.backward ? 1.0 / d : d;
    } catch (const NoReturn&) {
      if (k == 1) throw;
    }
  }
  return 1.0;
}

// Sign of P(s) - s, using the inverse map when the forward orbit does not return.
int side_sign(const FieldFamily& f, const ParamPoint& e, const Section& sec, double s, double tol,
              const ReturnOptions& base) {
  for (bool backward : {false, true}) {
    ReturnOptions r = base;
    r.backward = backward;
    try {
      const double d = return_map(f, e, sec, s, tol, r).s_out - s;
      const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
      return backward ? -sg : sg;
    } catch (const NoReturn&) {
    } catch (const PreconditionError&) {
    }
  }
  return 0;
}

}  // namespace

std::vector<LimitCycle> find_limit_cycles(const FieldFamily& family, const ParamPoint& eps,
                                          const std::vector<Section>& sections, const CycleOptions& opts,
                                          std::vector<std::string>* diagnostics, bool* continuum_suspected) {
  std::vector<LimitCycle> cycles;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const Section& sec = sections[k];
    const FixedPointScan scan = fixed_points_of_return(family, eps, sec, opts.tol, opts.fixed);
    if (scan.continuum_suspected) {
      if (continuum_suspected) *continuum_suspected = true;
      if (diagnostics) diagnostics->push_back("section " + std::to_string(k) + ": continuum of periodic orbits suspected");
      continue;
    }
    for (const auto& fp : scan.points) {
      LimitCycle c;
      c.section_index = static_cast<int>(k);
      c.s = fp.s;
      ReturnOptions ret = opts.fixed.ret;
      ret.backward = fp.from_inverse;
      double gap_dir = 0.0;
      try {
        const auto r = return_map_orbit(family, eps, sec, fp.s, opts.tol, c.polyline, ret);
        c.period = std::abs(r.flight_time);
        c.multiplier = fp.dP;
        // Sensitivity of the multiplier to the integration tolerance, measured in
        // the contracting direction where it is meaningful. Never below the
        // tolerance itself: an exact-looking flow (radial models) says nothing
        // about how well a coarse run resolves the multiplier.
        const double m_dir = ret.backward ? 1.0 / c.multiplier : c.multiplier;
        const double coarse = return_map(family, eps, sec, fp.s, 10.0 * opts.tol, ret).dP;
        c.multiplier_uncertainty = std::max(std::abs(coarse - m_dir), opts.tol);
        gap_dir = std::abs(m_dir - 1.0);
      } catch (const std::exception& ex) {
        if (diagnostics) diagnostics->push_back(std::string("cycle polish failed: ") + ex.what());
        continue;
      }
      if (c.polyline.size() >= 2 && distance(c.polyline.front(), c.polyline.back()) > 1e-4 && diagnostics) {
        diagnostics->push_back("cycle at s=" + std::to_string(c.s) + " does not close within 1e-4");
      }

      const double gap = gap_dir;
      const double eta = opts.derivative_step;
      if (gap >= std::max(opts.floor, c.multiplier_uncertainty)) {
        c.multiplicity = 1;
      } else if (c.multiplier_uncertainty >= opts.floor) {
        c.multiplicity = 0;
        if (diagnostics) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "cycle at s=%.6g: multiplier %.9g indistinguishable from 1 (uncertainty %.3g)",
                        c.s, c.multiplier, c.multiplier_uncertainty);
          diagnostics->push_back(buf);
        }
      } else {
        try {
          const double up = forward_dP(family, eps, sec, c.s + eta, opts.tol, ret);
          const double dn = forward_dP(family, eps, sec, c.s - eta, opts.tol, ret);
          const double d2 = (up - dn) / (2.0 * eta);
          const double d3 = (up - 2.0 * c.multiplier + dn) / (eta * eta);
          if (std::abs(d2) > opts.higher_order_floor) {
            c.multiplicity = 2;
          } else if (std::abs(d3) > opts.higher_order_floor) {
            c.multiplicity = 3;
          } else {
            c.multiplicity = 0;
          }
        } catch (const std::exception&) {
          c.multiplicity = 0;
        }
        if (c.multiplicity == 0 && diagnostics) {
          diagnostics->push_back("cycle at s=" + std::to_string(c.s) + ": multiplicity above 3 or unresolved");
        }
      }

      const int left = side_sign(family, eps, sec, c.s - eta, opts.tol, opts.fixed.ret);
      const int right = side_sign(family, eps, sec, c.s + eta, opts.tol, opts.fixed.ret);
      if (c.multiplicity == 1) {
        const bool contracting = std::abs(c.multiplier) < 1.0;
        c.stability = contracting ? CycleStability::attracting : CycleStability::repelling;
      } else if (left > 0 && right < 0) {
        c.stability = CycleStability::attracting;
      } else if (left < 0 && right > 0) {
        c.stability = CycleStability::repelling;
      } else if (left > 0 && right > 0) {
        c.stability = CycleStability::semi_stable_inner_attracting;
      } else if (left < 0 && right < 0) {
        c.stability = CycleStability::semi_stable_outer_attracting;
      }

      bool dup = false;
      for (const auto& other : cycles) {
        if (other.section_index != c.section_index && same_curve(other.polyline, c.polyline, 1e-4)) {
          dup = true;
          break;
        }
      }
      if (!dup) cycles.push_back(std::move(c));
    }
  }
  for (std::size_t i = 0; i < cycles.size(); ++i) cycles[i].id = static_cast<int>(i);
  return cycles;
}

namespace {

bool inside(const LimitCycle& c, const Vec2& p) { return point_in_polygon(c.polyline, p); }

// Nest partition: two cycles share a nest when one encloses the other and no
// singular point lies in the ring between them.
std::vector<std::vector<int>> build_nests(std::vector<LimitCycle>& cycles, const std::vector<SingularPoint>& pts) {
  const std::size_t n = cycles.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || cycles[i].polyline.empty()) continue;
      // i inside j?
      if (!inside(cycles[j], cycles[i].polyline.front())) continue;
      bool separated = false;
      for (const auto& sp : pts) {
        if (inside(cycles[j], sp.location) && !inside(cycles[i], sp.location)) {
          separated = true;
          break;
        }
      }
      if (!separated) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  }
  std::vector<std::vector<int>> nests;
  std::vector<int> nest_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = find(static_cast<int>(i));
    if (nest_of_root[r] < 0) {
      nest_of_root[r] = static_cast<int>(nests.size());
      nests.emplace_back();
    }
    cycles[i].nest_id = nest_of_root[r];
    nests[nest_of_root[r]].push_back(cycles[i].id);
  }
  return nests;
}

}  // namespace

bool classify_cycle_interesting(const LimitCycle& cycle, const PhasePortrait& portrait) {
  if (cycle.nest_id < 0 || cycle.nest_id >= static_cast<int>(portrait.nests.size())) {
    throw PreconditionError("cycle has no nest in this portrait");
  }
  for (int id : portrait.nests[cycle.nest_id]) {
    const int m = portrait.cycles[id].multiplicity;
    if (m == 0) throw Unresolvable("nest member " + std::to_string(id) + " has unresolved multiplicity");
    if (m % 2 != 0) return false;
  }
  // Domain boundaries stand for a hyperbolic attractor (outflow) or repeller
  // (inflow), and otherwise for nothing; in no case do they qualify.
  bool in_ok = false, out_ok = false;
  for (const auto& sp : portrait.singular_points) {
    if (sp.attractor() || sp.repeller()) continue;
    if (inside(cycle, sp.location)) {
      in_ok = true;
    } else {
      out_ok = true;
    }
  }
  return in_ok && out_ok;
}

bool PhasePortrait::unresolved() const {
  if (continuum_suspected) return true;
  return std::any_of(cycles.begin(), cycles.end(), [](const LimitCycle& c) { return c.multiplicity == 0; });
}

PhasePortrait compute_portrait(const FieldFamily& family, const ParamPoint& eps, const PortraitOptions& opts) {
  PhasePortrait pp;
  pp.eps = eps;
  pp.boundary = family.domain().boundary;
  pp.singular_points = find_singular_points(family, eps, opts.seeds_per_axis, &pp.diagnostics, opts.cycles.floor);
  CycleOptions co = opts.cycles;
  co.tol = opts.tol;
  pp.cycles = find_limit_cycles(family, eps, family.sections(), co, &pp.diagnostics, &pp.continuum_suspected);
  pp.nests = build_nests(pp.cycles, pp.singular_points);
  for (auto& c : pp.cycles) {
    try {
      c.interesting = classify_cycle_interesting(c, pp);
    } catch (const Unresolvable& ex) {
      c.interesting = false;
      pp.diagnostics.push_back(std::string("interesting test: ") + ex.what());
    }
  }
  if (opts.trace) pp.separatrices = trace_separatrices(family, pp, opts);
  return pp;
}

}  // namespace lbs

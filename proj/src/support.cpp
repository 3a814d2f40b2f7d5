#include "lbs/support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace lbs {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::per: return "per";
    case Provenance::sep: return "sep";
    case Provenance::sing: return "sing";
    case Provenance::elbs_orbit: return "elbs-orbit";
  }
  return "?";
}

std::vector<Vec2> SupportSet::coords() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& tp : points) out.push_back(tp.p);
  return out;
}

std::vector<Vec2> SupportSet::component_points(int c) const {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (component[i] == c) out.push_back(points[i].p);
  }
  return out;
}

void SupportSet::recompute_components() {
  const std::size_t n = points.size();
  component.assign(n, -1);
  component_count = 0;
  if (n == 0) return;
  const std::vector<Vec2> pts = coords();
  const PointIndex index(pts, match_radius());
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    const int c = component_count++;
    component[i] = c;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      for (std::size_t j : index.within(pts[k], match_radius())) {
        if (component[j] < 0) {
          component[j] = c;
          stack.push_back(j);
        }
      }
    }
  }
}

void thin_points(std::vector<TaggedPoint>& pts, double h) {
  const double r = 0.5 * h;
  std::unordered_map<long long, std::vector<Vec2>> buckets;
  auto key = [](long long i, long long j) { return i * 4000037LL + j; };
  std::vector<TaggedPoint> kept;
  kept.reserve(pts.size());
  for (const auto& tp : pts) {
    const long long i = static_cast<long long>(std::floor(tp.p.x / r));
    const long long j = static_cast<long long>(std::floor(tp.p.y / r));
    bool close = false;
    for (long long di = -1; di <= 1 && !close; ++di) {
      for (long long dj = -1; dj <= 1 && !close; ++dj) {
        auto it = buckets.find(key(i + di, j + dj));
        if (it == buckets.end()) continue;
        for (const auto& q : it->second) {
          if (distance(q, tp.p) < r) {
            close = true;
            break;
          }
        }
      }
    }
    if (close) continue;
    buckets[key(i, j)].push_back(tp.p);
    kept.push_back(tp);
  }
  pts = std::move(kept);
}

std::vector<double> default_shells(double h) {
  std::vector<double> out;
  for (double rho = 0.05; out.size() < 3 || out.back() >= h * h; rho /= 5.0) out.push_back(rho);
  return out;
}

std::vector<ParamPoint> shell_samples(std::size_t dim, double rho, int count) {
  std::vector<ParamPoint> out;
  if (dim == 1) {
    // The sphere is two points; the rest of the samples sit just inside it.
    const int half = std::max(1, count / 2);
    for (int k = 0; k < half; ++k) {
      const double v = rho * (1.0 - 0.5 * k / half);
      out.push_back(ParamPoint{v});
      out.push_back(ParamPoint{-v});
    }
    return out;
  }
  // Walk the boundary of the square in the first two coordinates, starting at (rho, 0).
  const double perimeter = 8.0 * rho;
  for (int k = 0; k < count; ++k) {
    double u = perimeter * k / count;
    ParamPoint e = ParamPoint::zero(dim);
    double x, y;
    if (u < rho) {
      x = rho, y = u;
    } else if ((u -= rho) < 2.0 * rho) {
      x = rho - u, y = rho;
    } else if ((u -= 2.0 * rho) < 2.0 * rho) {
      x = -rho, y = rho - u;
    } else if ((u -= 2.0 * rho) < 2.0 * rho) {
      x = -rho + u, y = -rho;
    } else {
      u -= 2.0 * rho;
      x = rho, y = -rho + u;
    }
    e[0] = x;
    e[1] = y;
    out.push_back(e);
  }
  return out;
}

SweepResult sweep(const FieldFamily& family, const std::vector<double>& shells, const SweepOptions& opts) {
  if (shells.size() < 3) throw PreconditionError("sweep needs at least 3 shells");
  for (std::size_t i = 1; i < shells.size(); ++i) {
    if (!(shells[i] < shells[i - 1]) || shells[i] <= 0.0) throw PreconditionError("shells must decrease strictly to 0");
  }
  if (opts.samples_per_shell < 4 * static_cast<int>(family.base_dim()) && family.base_dim() <= 2) {
    throw PreconditionError("need at least 4 samples per shell per parameter dimension");
  }
  SweepResult out;
  out.shells = shells;
  for (std::size_t m = 0; m < shells.size(); ++m) {
    for (const auto& e : shell_samples(family.base_dim(), shells[m], opts.samples_per_shell)) {
      SweepSample s;
      s.eps = e;
      s.shell = static_cast<int>(m);
      try {
        const PhasePortrait pp = compute_portrait(family, e, opts.portrait);
        for (const auto& c : pp.cycles) {
          const Polyline r = resample(c.polyline, opts.spacing);
          s.per_points.insert(s.per_points.end(), r.begin(), r.end());
        }
        for (const auto& sep : pp.separatrices) {
          const Polyline r = resample(sep.polyline, opts.spacing);
          s.sep_points.insert(s.sep_points.end(), r.begin(), r.end());
        }
      } catch (const std::exception& ex) {
        s.ok = false;
        s.error = ex.what();
      }
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

struct Lattice {
  double h;
  long i0, i1, j0, j1;  // inclusive index ranges of the nodes i*h, j*h
  Lattice(const Rect& b, double h_)
      : h(h_),
        i0(static_cast<long>(std::ceil(b.x_min / h_ - 1e-9))),
        i1(static_cast<long>(std::floor(b.x_max / h_ + 1e-9))),
        j0(static_cast<long>(std::ceil(b.y_min / h_ - 1e-9))),
        j1(static_cast<long>(std::floor(b.y_max / h_ + 1e-9))) {}
  Vec2 node(long i, long j) const { return {i * h, j * h}; }
  long nx() const { return i1 - i0 + 1; }
  long ny() const { return j1 - j0 + 1; }
  bool valid(long i, long j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
  std::size_t index(long i, long j) const { return static_cast<std::size_t>((i - i0) * ny() + (j - j0)); }
};

}  // namespace

SupportSet compute_acc(const SweepResult& sw, const FieldFamily& family, double h) {
  SupportSet out;
  out.h = h;
  const std::size_t shells = sw.shells.size();
  std::vector<bool> contributed(shells, false);
  for (const auto& s : sw.samples) {
    if (s.ok) contributed[s.shell] = true;
  }
  const auto n_contrib = std::count(contributed.begin(), contributed.end(), true);
  if (n_contrib < 3) throw InsufficientShells("only " + std::to_string(n_contrib) + " shells contributed");
  for (const auto& s : sw.samples) {
    if (!s.ok) out.diagnostics.push_back("sample at shell " + std::to_string(s.shell) + " failed: " + s.error);
  }

  // Points usable at shell m: every sample with |eps| <= rho_m, i.e. shells m and beyond.
  std::vector<std::vector<Vec2>> per(shells), all(shells);
  for (std::size_t m = 0; m < shells; ++m) {
    for (const auto& s : sw.samples) {
      if (!s.ok || s.shell < static_cast<int>(m)) continue;
      per[m].insert(per[m].end(), s.per_points.begin(), s.per_points.end());
      all[m].insert(all[m].end(), s.per_points.begin(), s.per_points.end());
      all[m].insert(all[m].end(), s.sep_points.begin(), s.sep_points.end());
    }
  }
  const double r = 3.0 * h;
  std::vector<PointIndex> index;
  index.reserve(shells);
  for (std::size_t m = 0; m < shells; ++m) index.emplace_back(all[m], r);
  const PointIndex per_last(per[shells - 1], r);

  const Lattice lat(family.domain().region.bounds(), h);
  std::vector<char> seen(static_cast<std::size_t>(lat.nx() * lat.ny()), 0);
  const long reach = static_cast<long>(std::ceil(r / h));
  for (const Vec2& q : all[shells - 1]) {
    const long ci = std::lround(q.x / h), cj = std::lround(q.y / h);
    for (long i = ci - reach; i <= ci + reach; ++i) {
      for (long j = cj - reach; j <= cj + reach; ++j) {
        if (!lat.valid(i, j)) continue;
        const std::size_t k = lat.index(i, j);
        if (seen[k]) continue;
        const Vec2 p = lat.node(i, j);
        if (distance(p, q) > r) continue;
        seen[k] = 1;
        if (!family.contains(p)) continue;
        bool persistent = true;
        for (std::size_t m = 0; m < shells && persistent; ++m) {
          if (contributed[m]) persistent = index[m].any_within(p, r);
        }
        if (!persistent) continue;
        out.points.push_back({p, per_last.any_within(p, r) ? Provenance::per : Provenance::sep});
      }
    }
  }
  std::sort(out.points.begin(), out.points.end(), [](const TaggedPoint& a, const TaggedPoint& b) {
    return std::tie(a.p.x, a.p.y) < std::tie(b.p.x, b.p.y);
  });
  out.recompute_components();
  return out;
}

ElbsResult compute_elbs(const FieldFamily& family, double h, const ElbsOptions& opts) {
  if (!(h > 0.0)) throw PreconditionError("resolution must be positive");
  ElbsResult res;
  const ParamPoint zero = ParamPoint::zero(family.base_dim());
  res.portrait = compute_portrait(family, zero, opts.portrait);
  const PhasePortrait& pp = res.portrait;
  SupportSet& out = res.elbs;
  out.h = h;

  for (const auto& sp : pp.singular_points) {
    if (!sp.hyperbolic) out.points.push_back({sp.location, Provenance::sing});
  }
  for (const auto& c : pp.cycles) {
    if (c.multiplicity == 0) {
      out.diagnostics.push_back("cycle " + std::to_string(c.id) + " has unresolved multiplicity; excluded");
      continue;
    }
    if (c.multiplicity == 1) continue;
    for (const Vec2& p : resample(c.polyline, h)) out.points.push_back({p, Provenance::per});
  }
  for (const auto& s : pp.separatrices) {
    const bool resolved = s.alpha.kind != LabelKind::unresolved && s.omega.kind != LabelKind::unresolved;
    if (resolved && s.alpha.interesting && s.omega.interesting) {
      for (const Vec2& p : resample(s.polyline, h)) {
        if (family.contains(p)) out.points.push_back({p, Provenance::sep});
      }
    }
  }

  // Limit-set labels on the lattice, computed on a coarse grid and refined where they differ.
  const Lattice lat(family.domain().region.bounds(), h);
  const std::size_t total = static_cast<std::size_t>(lat.nx() * lat.ny());
  constexpr int kUnknown = -1, kOutside = -2;
  std::vector<int> computed(total, kUnknown), inherited(total, kUnknown);
  std::map<std::tuple<int, int, int, int, int, int>, int> ids;
  std::vector<bool> both;        // per label id: both limit sets interesting
  std::vector<bool> unresolved;  // per label id

  LimitSetOptions lo = opts.limits;
  lo.record = nullptr;
  lo.exclude_owner = -1;
  auto label_of = [&](long i, long j) -> int {
    if (!lat.valid(i, j)) return kOutside;
    const std::size_t k = lat.index(i, j);
    if (computed[k] != kUnknown) return computed[k];
    const Vec2 p = lat.node(i, j);
    if (!family.contains(p)) return computed[k] = kOutside;
    ++res.classified_nodes;
    const LimitSetLabel w = classify_limit_set(family, pp, p, TimeDirection::omega, lo);
    LimitSetLabel a{LabelKind::unresolved, -2, false};
    const bool w_ok = w.kind != LabelKind::unresolved;
    if (w_ok && w.interesting) a = classify_limit_set(family, pp, p, TimeDirection::alpha, lo);
    const auto key = std::make_tuple(static_cast<int>(w.kind), w.target_id, static_cast<int>(w.interesting),
                                     static_cast<int>(a.kind), a.target_id, static_cast<int>(a.interesting));
    auto it = ids.find(key);
    if (it == ids.end()) {
      it = ids.emplace(key, static_cast<int>(both.size())).first;
      both.push_back(w_ok && w.interesting && a.kind != LabelKind::unresolved && a.interesting);
      unresolved.push_back(!w_ok || (w.interesting && a.kind == LabelKind::unresolved));
    }
    return computed[k] = it->second;
  };

  const long step = 1L << std::max(0, opts.coarse_levels);
  std::vector<std::tuple<long, long, long>> stack;
  for (long i = lat.i0; i < lat.i1; i += step) {
    for (long j = lat.j0; j < lat.j1; j += step) stack.emplace_back(i, j, step);
  }
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    const auto [i, j, s] = stack.back();
    stack.pop_back();
    const int c0 = label_of(i, j), c1 = label_of(i + s, j), c2 = label_of(i, j + s), c3 = label_of(i + s, j + s);
    if (c0 == c1 && c0 == c2 && c0 == c3) {
      for (long a = i; a <= i + s; ++a) {
        for (long b = j; b <= j + s; ++b) {
          if (lat.valid(a, b)) inherited[lat.index(a, b)] = c0;
        }
      }
      continue;
    }
    if (s == 1) continue;
    const long hs = s / 2;
    // Pushed in reverse so that cells are visited in lexicographic order.
    stack.emplace_back(i + hs, j + hs, hs);
    stack.emplace_back(i + hs, j, hs);
    stack.emplace_back(i, j + hs, hs);
    stack.emplace_back(i, j, hs);
  }

  std::vector<char> inside(total, 0);
  std::size_t unresolved_nodes = 0;
  for (long i = lat.i0; i <= lat.i1; ++i) {
    for (long j = lat.j0; j <= lat.j1; ++j) {
      const std::size_t k = lat.index(i, j);
      const int id = computed[k] != kUnknown ? computed[k] : inherited[k];
      if (id < 0) continue;
      if (unresolved[id]) ++unresolved_nodes;
      if (both[id]) inside[k] = 1;
    }
  }
  res.unresolved_nodes = unresolved_nodes;
  if (unresolved_nodes > 0) {
    out.diagnostics.push_back(std::to_string(unresolved_nodes) + " lattice nodes with unresolved limit sets excluded");
  }
  // Closure: also take the lattice neighbours of included nodes.
  for (long i = lat.i0; i <= lat.i1; ++i) {
    for (long j = lat.j0; j <= lat.j1; ++j) {
      bool take = false;
      for (long di = -1; di <= 1 && !take; ++di) {
        for (long dj = -1; dj <= 1 && !take; ++dj) {
          if (lat.valid(i + di, j + dj) && inside[lat.index(i + di, j + dj)]) take = true;
        }
      }
      const Vec2 p = lat.node(i, j);
      if (take && family.contains(p)) out.points.push_back({p, Provenance::elbs_orbit});
    }
  }
  thin_points(out.points, h);
  out.recompute_components();
  return res;
}

namespace {

bool near_any(const PointIndex& idx, const Vec2& p, double r) { return idx.size() > 0 && idx.any_within(p, r); }

SupportSet restrict_to(const SupportSet& from, const std::vector<Vec2>& anchors, double r) {
  SupportSet out;
  out.h = from.h;
  const PointIndex idx(anchors, r);
  for (const auto& tp : from.points) {
    if (near_any(idx, tp.p, r)) out.points.push_back(tp);
  }
  out.recompute_components();
  return out;
}

}  // namespace

LbsResult compute_lbs(const FieldFamily& family, double h, const LbsOptions& opts) {
  LbsResult r;
  ElbsResult e = compute_elbs(family, h, opts.elbs);
  r.portrait = std::move(e.portrait);
  r.elbs = std::move(e.elbs);
  SweepOptions so = opts.sweep;
  so.spacing = h;
  r.sweep = sweep(family, opts.shells.empty() ? default_shells(h) : opts.shells, so);
  r.acc = compute_acc(r.sweep, family, h);

  std::vector<Vec2> anchors = r.acc.coords();
  for (const auto& sp : r.portrait.singular_points) anchors.push_back(sp.location);
  r.lbs = restrict_to(r.elbs, anchors, 3.0 * h);
  r.lbs.diagnostics = r.elbs.diagnostics;
  r.lbs.diagnostics.insert(r.lbs.diagnostics.end(), r.acc.diagnostics.begin(), r.acc.diagnostics.end());
  r.lbs_star = compute_lbs_star(r.lbs, r.portrait);
  return r;
}

SupportSet compute_lbs_star(const SupportSet& lbs, const PhasePortrait& pp) {
  const double r = lbs.match_radius();
  std::vector<Vec2> removed;
  for (const auto& c : pp.cycles) {
    if (!c.interesting) {
      const Polyline q = resample(c.polyline, lbs.h);
      removed.insert(removed.end(), q.begin(), q.end());
    }
  }
  for (const auto& sp : pp.singular_points) {
    if (sp.cls == PointClass::andronov_hopf) removed.push_back(sp.location);
  }
  SupportSet out;
  out.h = lbs.h;
  const PointIndex idx(removed, r);
  for (const auto& tp : lbs.points) {
    // Only the cycle's own points and the Hopf point itself leave.
    const bool drop = (tp.tag == Provenance::per || tp.tag == Provenance::sing) && near_any(idx, tp.p, r);
    if (!drop) out.points.push_back(tp);
  }
  out.recompute_components();
  return out;
}

CheckReport check_prop7(const SupportSet& lbs, const PhasePortrait& pp) {
  CheckReport rep;
  rep.check = "prop7";
  rep.metric = lbs.component_count;
  const auto elements = detect_non_andronov(pp);
  const double r = lbs.match_radius();
  std::vector<PointIndex> where;
  for (const auto& el : elements) {
    const Polyline w = el.where.size() > 1 ? resample(el.where, lbs.h) : el.where;
    where.emplace_back(w, r);
  }
  rep.pass = true;
  for (int c = 0; c < lbs.component_count; ++c) {
    const auto pts = lbs.component_points(c);
    std::string witnesses;
    for (std::size_t k = 0; k < elements.size(); ++k) {
      const bool hit = std::any_of(pts.begin(), pts.end(), [&](const Vec2& p) { return near_any(where[k], p, r); });
      if (!hit) continue;
      if (!witnesses.empty()) witnesses += ", ";
      witnesses += to_string(elements[k].kind);
      for (int ref : elements[k].refs) witnesses += " #" + std::to_string(ref);
    }
    if (witnesses.empty()) {
      rep.pass = false;
      rep.notes.push_back("violation: component " + std::to_string(c) + " (" + std::to_string(pts.size()) +
                          " points) has no non-Andronov witness");
    } else {
      rep.notes.push_back("component " + std::to_string(c) + ": " + witnesses);
    }
  }
  if (lbs.component_count == 0) rep.notes.push_back("empty LBS");
  return rep;
}

CheckReport check_lbs_consistency(const LbsResult& r) {
  CheckReport rep;
  rep.check = "lbs-consistency";
  rep.pass = true;
  const double tol = 3.0 * r.lbs.h;
  const auto lbs = r.lbs.coords();
  auto claim = [&](const std::string& what, double d, double limit) {
    rep.notes.push_back(what + ": " + std::to_string(d));
    rep.metric = std::max(rep.metric, std::isfinite(d) ? d : 1e300);
    if (!(d <= limit)) rep.pass = false;
  };
  claim("LBS in ELBS", directed_hausdorff(lbs, r.elbs.coords()), tol);
  std::vector<Vec2> anchors = r.acc.coords();
  for (const auto& sp : r.portrait.singular_points) anchors.push_back(sp.location);
  claim("LBS in Sing + Acc", directed_hausdorff(lbs, anchors), tol);
  claim("LBS* in LBS", directed_hausdorff(r.lbs_star.coords(), lbs), tol);

  // Distance from the LBS to the hyperbolic objects that may not appear in it.
  double gap = INFINITY;
  for (const auto& c : r.portrait.cycles) {
    if (c.multiplicity != 1) continue;
    const Polyline q = resample(c.polyline, r.lbs.h);
    for (const Vec2& p : q) {
      for (const Vec2& l : lbs) gap = std::min(gap, distance(p, l));
    }
  }
  for (const auto& sp : r.portrait.singular_points) {
    if (!(sp.attractor() || sp.repeller())) continue;
    for (const Vec2& l : lbs) gap = std::min(gap, distance(sp.location, l));
  }
  rep.notes.push_back("gap to hyperbolic cycles and attractors/repellers: " + std::to_string(gap));
  if (gap < r.lbs.h) rep.pass = false;
  return rep;
}

namespace {

void require_inside_domain(const FieldFamily& family, const Region& region, const std::string& what) {
  std::vector<Vec2> probe;
  if (region.is_annulus()) {
    const Annulus& a = region.as_annulus();
    for (int k = 0; k < 720; ++k) {
      const double t = 2.0 * M_PI * k / 720.0;
      probe.push_back(a.center + a.r_max * Vec2{std::cos(t), std::sin(t)});
    }
  } else {
    const Rect& b = region.as_rect();
    for (int k = 0; k <= 200; ++k) {
      const double u = static_cast<double>(k) / 200.0;
      const double x = b.x_min + u * (b.x_max - b.x_min), y = b.y_min + u * (b.y_max - b.y_min);
      probe.insert(probe.end(), {{x, b.y_min}, {x, b.y_max}, {b.x_min, y}, {b.x_max, y}});
    }
  }
  for (const Vec2& p : probe) {
    if (!family.contains(p)) throw PreconditionError(what + " support leaves the phase domain");
  }
}

// Cut value must be 1 at each LBS point and at its 3h neighbours.
template <class F>
void require_cover(const SupportSet& lbs, F&& value, const std::string& what) {
  const double r = lbs.match_radius();
  const Vec2 offs[] = {{0.0, 0.0}, {r, 0.0}, {-r, 0.0}, {0.0, r}, {0.0, -r}};
  for (const auto& tp : lbs.points) {
    for (const Vec2& o : offs) {
      if (std::abs(value(tp.p + o) - 1.0) > 1e-12) {
        throw PreconditionError(what + " is not 1 near the LBS point (" + std::to_string(tp.p.x) + ", " +
                                std::to_string(tp.p.y) + ")");
      }
    }
  }
}

std::string counts(const char* tag, const LbsResult& r) {
  return std::string(tag) + ": " + std::to_string(r.lbs.points.size()) + " points, " +
         std::to_string(r.lbs.component_count) + " components";
}

}  // namespace

CheckReport check_stabilization_invariance(const FieldFamily& family, const CutFunction& phi, double h,
                                           const LbsOptions& opts) {
  require_inside_domain(family, phi.support(), "cut function");
  const LbsResult base = compute_lbs(family, h, opts);
  require_cover(base.lbs, [&](const Vec2& p) { return phi.eval(p); }, "cut function");
  const LbsResult stab = compute_lbs(stabilize(family, phi), h, opts);
  CheckReport rep;
  rep.check = "stabilization-invariance";
  const auto a = base.lbs.coords(), b = stab.lbs.coords();
  rep.metric = a.empty() && b.empty() ? 0.0 : hausdorff(a, b);
  rep.pass = rep.metric <= 3.0 * h;
  rep.notes.push_back(counts("family", base));
  rep.notes.push_back(counts("stabilized", stab));
  rep.notes.push_back("hausdorff distance: " + std::to_string(rep.metric) + " (limit " + std::to_string(3.0 * h) + ")");
  return rep;
}

CheckReport check_split_inclusion(const SplittingData& data, double h, const LbsOptions& opts) {
  data.validate();
  require_inside_domain(data.family, data.phi1.support(), "phi1");
  require_inside_domain(data.family, data.phi2.support(), "phi2");
  const LbsResult base = compute_lbs(data.family, h, opts);
  require_cover(base.lbs, [&](const Vec2& p) { return data.phi1.eval(p) + data.phi2.eval(p); }, "phi1 + phi2");
  const LbsResult split = compute_lbs(split_family(data), h, opts);
  CheckReport rep;
  rep.check = "split-inclusion";
  rep.metric = directed_hausdorff(split.lbs.coords(), base.lbs.coords());
  if (split.lbs.empty()) rep.metric = 0.0;
  rep.pass = rep.metric <= 3.0 * h;
  rep.notes.push_back(counts("family", base));
  rep.notes.push_back(counts("split", split));
  rep.notes.push_back("one-sided distance split -> family: " + std::to_string(rep.metric) + " (limit " +
                      std::to_string(3.0 * h) + ")");
  return rep;
}

}  // namespace lbs

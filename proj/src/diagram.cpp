#include "lbs/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace lbs {

std::string to_string(DegeneracyClass c) {
  switch (c) {
    case DegeneracyClass::AH: return "AH";
    case DegeneracyClass::SN: return "SN";
    case DegeneracyClass::HC: return "HC";
    case DegeneracyClass::SC: return "SC";
    case DegeneracyClass::SL: return "SL";
    case DegeneracyClass::PC: return "PC";
    case DegeneracyClass::none: return "none";
    case DegeneracyClass::other: return "other";
  }
  return "?";
}

std::vector<std::size_t> GridSpec::free_axes() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (hi[a] > lo[a]) out.push_back(a);
  }
  return out;
}

std::size_t GridSpec::nodes_along(std::size_t axis) const {
  if (!(hi[axis] > lo[axis])) return 1;
  return static_cast<std::size_t>(std::llround((hi[axis] - lo[axis]) / step)) + 1;
}

void GridSpec::validate(std::size_t base_dim) const {
  if (lo.size() != base_dim || hi.size() != base_dim) throw PreconditionError("grid dimension differs from the base");
  if (!(step > 0.0)) throw PreconditionError("grid step must be positive");
  const auto axes = free_axes();
  if (axes.empty() || axes.size() > 2) throw PreconditionError("grid needs one or two free axes");
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (hi[a] < lo[a]) throw PreconditionError("grid bounds reversed");
    const double n = (hi[a] - lo[a]) / step;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
      throw PreconditionError("grid step does not divide the box evenly");
    }
  }
}

GridSpec GridSpec::box(std::size_t dim, double half_width, double step) {
  GridSpec g;
  g.lo.assign(dim, -half_width);
  g.hi.assign(dim, half_width);
  g.step = step;
  return g;
}

std::size_t BifurcationDiagram::cell_index(const std::vector<std::size_t>& idx) const {
  std::size_t k = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) k = k * shape[a] + idx[a];
  return k;
}

bool BifurcationDiagram::labeled(std::size_t cell, int region) const {
  for (const auto& l : cells[cell].labels) {
    if (l.cls == DegeneracyClass::none) continue;
    if (region == -2 || l.region == region) return true;
  }
  return false;
}

ParamPoint BifurcationDiagram::cell_center(std::size_t cell) const {
  ParamPoint e(grid.lo);
  for (std::size_t a = 0; a < axes.size(); ++a) {
    e[axes[a]] = grid.value(axes[a], cells[cell].index[a]) + 0.5 * grid.step;
  }
  return e;
}

namespace {

std::optional<Vec2> newton_point(const FieldFamily& f, const ParamPoint& e, Vec2 p) {
  for (int it = 0; it < 60; ++it) {
    const Vec2 v = f.eval_raw(e.coords, p);
    if (norm(v) < 1e-13) return p;
    const Mat2 J = f.jacobian_raw(e.coords, p);
    const double det = J.det();
    if (std::abs(det) < 1e-14) return std::nullopt;
    const Vec2 step{(J.d * v.x - J.b * v.y) / det, (-J.c * v.x + J.a * v.y) / det};
    p -= step;
    if (!f.contains(p)) return std::nullopt;
  }
  return norm(f.eval_raw(e.coords, p)) < 1e-10 ? std::optional<Vec2>(p) : std::nullopt;
}

// First crossing of the segment along the orbit; returns the section coordinate.
std::optional<double> first_crossing(const FieldFamily& f, const ParamPoint& e, const Vec2& seed, double t_max,
                                     double tol, const Section& sec) {
  std::optional<double> hit;
  FlowOptions fo;
  fo.record = false;
  fo.stop_at_sinks = false;
  run_flow(f, e.coords, seed, t_max, tol, false, fo, [&](const StepView& sv) {
    const Vec2 a{sv.y0()[0], sv.y0()[1]}, b{sv.y1()[0], sv.y1()[1]};
    const double ga = sec.offset(a), gb = sec.offset(b);
    if ((ga < 0.0) == (gb < 0.0)) return true;
    double lo = 0.0, hi = 1.0, glo = ga, ghi = gb, buf[2] = {b.x, b.y};
    for (int it = 0; it < 60; ++it) {
      double th = (glo * hi - ghi * lo) / (glo - ghi);
      if (!(th > lo && th < hi)) th = 0.5 * (lo + hi);
      sv.interpolate(th, buf, 2);
      const double g = sec.offset({buf[0], buf[1]});
      if (std::abs(g) < 1e-15) break;
      if ((g < 0.0) == (glo < 0.0)) {
        lo = th;
        glo = g;
        ghi *= 0.5;
      } else {
        hi = th;
        ghi = g;
        glo *= 0.5;
      }
    }
    const double c = sec.coordinate({buf[0], buf[1]});
    if (std::abs(c) > sec.half_length) return true;
    hit = c;
    return false;
  });
  return hit;
}

}  // namespace

std::optional<double> probe_splitting(const FieldFamily& f, const ParamPoint& e, const ConnectionProbe& probe, double tol,
                                      Vec2* crossing, double* characteristic) {
  const auto su = newton_point(f, e, probe.unstable_saddle);
  const auto ss = newton_point(f, e, probe.stable_saddle);
  if (!su || !ss) return std::nullopt;
  auto branch = [&](const Vec2& p, const Vec2& hint, bool unstable, double* ratio) -> std::optional<Vec2> {
    const Mat2 J = f.jacobian_raw(e.coords, p);
    const auto ev = eigenvalues(J);
    if (ev[0].imag() != 0.0 || !(ev[0].real() < 0.0 && ev[1].real() > 0.0)) return std::nullopt;
    if (ratio) *ratio = -ev[0].real() / ev[1].real();
    Vec2 d = eigenvector(J, unstable ? ev[1].real() : ev[0].real());
    if (dot(d, hint) < 0.0) d = -d;
    return d;
  };
  double sigma = 0.0;
  const auto du = branch(*su, probe.unstable_hint, true, &sigma);
  const auto ds = branch(*ss, probe.stable_hint, false, nullptr);
  if (!du || !ds) return std::nullopt;
  constexpr double kOffset = 1e-6, kTime = 100.0;
  const auto cu = first_crossing(f, e, *su + kOffset * *du, kTime, tol, probe.crossing);
  const auto cs = first_crossing(f, e, *ss + kOffset * *ds, -kTime, tol, probe.crossing);
  if (!cu || !cs) return std::nullopt;
  if (crossing) *crossing = probe.crossing.point(*cu);
  if (characteristic) *characteristic = sigma;
  return *cu - *cs;
}

namespace {

struct NodeEval {
  ParamPoint eps;
  bool ok = true;
  std::string error;
  std::vector<SingularPoint> points;
  std::vector<LimitCycle> cycles;  // sorted by (section, s)
  std::vector<std::optional<double>> split;
  std::vector<Vec2> split_at;
  std::vector<double> sigma;
};

bool focus_type(const SingularPoint& sp) {
  return sp.eigenvalues[0].imag() != 0.0 || sp.cls == PointClass::andronov_hopf;
}

double det_of(const SingularPoint& sp) { return (sp.eigenvalues[0] * sp.eigenvalues[1]).real(); }

bool probe_is_loop(const ConnectionProbe& p) { return distance(p.unstable_saddle, p.stable_saddle) < 1e-9; }

NodeEval evaluate(const FieldFamily& f, const ParamPoint& e, const DiagramOptions& opts) {
  NodeEval n;
  n.eps = e;
  try {
    n.points = find_singular_points(f, e, opts.seeds_per_axis, nullptr, opts.cycles.floor);
    n.cycles = find_limit_cycles(f, e, f.sections(), opts.cycles);
    std::sort(n.cycles.begin(), n.cycles.end(), [](const LimitCycle& a, const LimitCycle& b) {
      return std::make_pair(a.section_index, a.s) < std::make_pair(b.section_index, b.s);
    });
    for (const auto& pr : f.probes()) {
      Vec2 at;
      double sigma = 0.0;
      n.split.push_back(probe_splitting(f, e, pr, opts.probe_tol, &at, &sigma));
      n.split_at.push_back(at);
      n.sigma.push_back(sigma);
    }
  } catch (const std::exception& ex) {
    n.ok = false;
    n.error = ex.what();
  }
  return n;
}

struct Labeler {
  const FieldFamily& f;
  const DiagramOptions& opts;
  const std::vector<Region>& regions;

  int region_of(const Vec2& p) const {
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (regions[k].contains(p)) return static_cast<int>(k);
    }
    return -1;
  }

  DegeneracyLabel make(DegeneracyClass c, const Vec2& loc, double disc, const ParamPoint& where, bool tangency,
                       std::string detail) const {
    DegeneracyLabel l;
    l.cls = c;
    l.location = loc;
    l.discriminant = disc;
    l.where = where;
    l.region = region_of(loc);
    l.tangency = tangency;
    l.detail = std::move(detail);
    return l;
  }

  DegeneracyClass hopf_class(const ParamPoint& e, const SingularPoint& sp) const {
    double l1 = 0.0;
    try {
      l1 = sp.lyapunov1 ? *sp.lyapunov1 : first_lyapunov_value(f, e, sp.location);
    } catch (const std::exception&) {
      return DegeneracyClass::other;
    }
    return std::abs(l1) > opts.side_floor ? DegeneracyClass::AH : DegeneracyClass::other;
  }

  // Zeros attained at a single node.
  std::vector<DegeneracyLabel> at_node(const NodeEval& n) const {
    std::vector<DegeneracyLabel> out;
    if (!n.ok) return out;
    for (const auto& sp : n.points) {
      if (focus_type(sp)) {
        const double re = sp.eigenvalues[0].real();
        if (std::abs(re) < opts.tangency_floor) {
          out.push_back(make(hopf_class(n.eps, sp), sp.location, re, n.eps, true, "focus trace"));
        }
      } else if (std::abs(det_of(sp)) < opts.tangency_floor) {
        const bool side = sp.sn_coefficient && std::abs(*sp.sn_coefficient) > opts.side_floor;
        out.push_back(make(side ? DegeneracyClass::SN : DegeneracyClass::other, sp.location, det_of(sp), n.eps, true,
                           "eigenvalue product"));
      }
    }
    for (const auto& c : n.cycles) {
      if (c.multiplicity == 1) continue;
      const Section& sec = f.sections()[c.section_index];
      out.push_back(make(c.multiplicity == 2 ? DegeneracyClass::PC : DegeneracyClass::other, sec.point(c.s),
                         c.multiplier - 1.0, n.eps, true, "multiplier - 1, multiplicity " + std::to_string(c.multiplicity)));
    }
    for (std::size_t k = 0; k < n.split.size(); ++k) {
      if (!n.split[k] || std::abs(*n.split[k]) >= opts.tangency_floor) continue;
      out.push_back(make(connection_class(n, k), n.split_at[k], *n.split[k], n.eps, true, "splitting " + f.probes()[k].id));
    }
    return out;
  }

  DegeneracyClass connection_class(const NodeEval& n, std::size_t k) const {
    if (!probe_is_loop(f.probes()[k])) return DegeneracyClass::SC;
    return std::abs(n.sigma[k] - 1.0) > opts.side_floor ? DegeneracyClass::SL : DegeneracyClass::other;
  }

  static ParamPoint lerp(const ParamPoint& a, const ParamPoint& b, double t) {
    ParamPoint e = a;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a[i] + t * (b[i] - a[i]);
    return e;
  }

  // Sign changes and folds between two adjacent nodes.
  std::vector<DegeneracyLabel> on_edge(const NodeEval& a, const NodeEval& b) const {
    std::vector<DegeneracyLabel> out;
    if (!a.ok || !b.ok) return out;
    // Focus trace.
    for (const auto& p : a.points) {
      if (!focus_type(p)) continue;
      const SingularPoint* q = nullptr;
      for (const auto& c : b.points) {
        if (focus_type(c) && distance(c.location, p.location) < 0.1 && (!q || distance(c.location, p.location) < distance(q->location, p.location))) q = &c;
      }
      if (!q) continue;
      const double ra = p.eigenvalues[0].real(), rb = q->eigenvalues[0].real();
      if (!(ra * rb < 0.0)) continue;
      const double t = ra / (ra - rb);
      const SingularPoint& near = std::abs(ra) < std::abs(rb) ? p : *q;
      const ParamPoint& e_near = std::abs(ra) < std::abs(rb) ? a.eps : b.eps;
      out.push_back(make(hopf_class(e_near, near), p.location + t * (q->location - p.location),
                         std::abs(ra) < std::abs(rb) ? ra : rb, lerp(a.eps, b.eps, t), false, "focus trace"));
    }
    // Folds: a saddle / anti-saddle pair on one side with no counterpart on the other.
    for (int side = 0; side < 2; ++side) {
      const NodeEval& x = side == 0 ? a : b;
      const NodeEval& y = side == 0 ? b : a;
      for (const auto& p : x.points) {
        if (det_of(p) >= 0.0) continue;
        const SingularPoint* q = nullptr;
        for (const auto& c : x.points) {
          if (det_of(c) > 0.0 && distance(c.location, p.location) < 0.5 &&
              (!q || distance(c.location, p.location) < distance(q->location, p.location)))
            q = &c;
        }
        if (!q) continue;
        const Vec2 mid = 0.5 * (p.location + q->location);
        const double r = std::max(0.05, distance(p.location, q->location));
        const auto left = std::count_if(y.points.begin(), y.points.end(), [&](const SingularPoint& c) { return distance(c.location, mid) < r; });
        if (left >= 2) continue;
        out.push_back(make(DegeneracyClass::SN, mid, det_of(p) * det_of(*q), lerp(a.eps, b.eps, 0.5), false,
                           "fold of singular points"));
      }
      for (std::size_t i = 0; i + 1 < x.cycles.size(); ++i) {
        const LimitCycle& c1 = x.cycles[i];
        const LimitCycle& c2 = x.cycles[i + 1];
        if (c1.section_index != c2.section_index || c1.multiplicity != 1 || c2.multiplicity != 1) continue;
        if (!((c1.multiplier - 1.0) * (c2.multiplier - 1.0) < 0.0)) continue;
        const double d = std::max(0.02, c2.s - c1.s);
        const auto left = std::count_if(y.cycles.begin(), y.cycles.end(), [&](const LimitCycle& c) {
          return c.section_index == c1.section_index && c.s > c1.s - d && c.s < c2.s + d;
        });
        if (left >= 2) continue;
        const Section& sec = f.sections()[c1.section_index];
        out.push_back(make(DegeneracyClass::PC, sec.point(0.5 * (c1.s + c2.s)),
                           std::min(std::abs(c1.multiplier - 1.0), std::abs(c2.multiplier - 1.0)), lerp(a.eps, b.eps, 0.5),
                           false, "fold of cycles"));
      }
    }
    // Separatrix splitting.
    for (std::size_t k = 0; k < a.split.size() && k < b.split.size(); ++k) {
      if (!a.split[k] || !b.split[k]) continue;
      const double da = *a.split[k], db = *b.split[k];
      if (!(da * db < 0.0)) continue;
      const double t = da / (da - db);
      const NodeEval& near = std::abs(da) < std::abs(db) ? a : b;
      out.push_back(make(connection_class(near, k), a.split_at[k] + t * (b.split_at[k] - a.split_at[k]),
                         std::abs(da) < std::abs(db) ? da : db, lerp(a.eps, b.eps, t), false, "splitting " + f.probes()[k].id));
    }
    return out;
  }
};

// One label per (class, region, location) in a cell; tangencies win, then the smaller discriminant.
void dedupe(std::vector<DegeneracyLabel>& v) {
  std::vector<DegeneracyLabel> out;
  for (auto& l : v) {
    bool merged = false;
    for (auto& o : out) {
      if (o.cls == l.cls && o.region == l.region && distance(o.location, l.location) < 0.1) {
        const bool better = (l.tangency && !o.tangency) ||
                            (l.tangency == o.tangency && std::abs(l.discriminant) < std::abs(o.discriminant));
        if (better) o = l;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(l);
  }
  v = std::move(out);
}

void assemble_curves(BifurcationDiagram& bd) {
  struct Item {
    std::size_t cell;
    std::size_t label;
  };
  std::vector<Item> items;
  for (std::size_t c = 0; c < bd.cells.size(); ++c) {
    for (std::size_t k = 0; k < bd.cells[c].labels.size(); ++k) items.push_back({c, k});
  }
  std::vector<std::size_t> parent(items.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const auto& ci = bd.cells[items[i].cell];
      const auto& cj = bd.cells[items[j].cell];
      bool adjacent = true;
      for (std::size_t a = 0; a < ci.index.size(); ++a) {
        const long d = static_cast<long>(ci.index[a]) - static_cast<long>(cj.index[a]);
        if (d < -1 || d > 1) adjacent = false;
      }
      if (!adjacent) continue;
      const auto& li = ci.labels[items[i].label];
      const auto& lj = cj.labels[items[j].label];
      if (li.cls == lj.cls && li.region == lj.region && distance(li.location, lj.location) < 0.25) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> ordered;
  for (auto& [root, members] : groups) ordered.push_back(members);
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  for (const auto& members : ordered) {
    DiagramCurve cv;
    const auto& first = bd.cells[items[members.front()].cell].labels[items[members.front()].label];
    cv.cls = first.cls;
    cv.region = first.region;
    const DegeneracyLabel* best = nullptr;
    ParamPoint mean = ParamPoint::zero(first.where.size());
    for (std::size_t m : members) {
      const auto& l = bd.cells[items[m].cell].labels[items[m].label];
      if (cv.cells.empty() || cv.cells.back() != items[m].cell) cv.cells.push_back(items[m].cell);
      cv.path.push_back(l.where);
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += l.where[i] / static_cast<double>(members.size());
      if (l.tangency && (!best || std::abs(l.discriminant) < std::abs(best->discriminant))) best = &l;
    }
    cv.estimate = best ? best->where : mean;
    bd.curves.push_back(std::move(cv));
  }
}

}  // namespace

BifurcationDiagram scan_diagram(const FieldFamily& family, const GridSpec& grid, const std::vector<Region>& regions,
                                const DiagramOptions& opts) {
  grid.validate(family.base_dim());
  BifurcationDiagram bd;
  bd.grid = grid;
  bd.axes = grid.free_axes();
  bd.region_count = regions.size();
  std::vector<std::size_t> nodes;
  for (std::size_t a : bd.axes) nodes.push_back(grid.nodes_along(a));
  for (std::size_t n : nodes) bd.shape.push_back(n - 1);

  // Node evaluations, row-major over the free axes.
  std::size_t total = 1;
  for (std::size_t n : nodes) total *= n;
  std::vector<NodeEval> evals;
  evals.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    ParamPoint e(grid.lo);
    std::size_t rest = k;
    for (std::size_t a = bd.axes.size(); a-- > 0;) {
      e[bd.axes[a]] = grid.value(bd.axes[a], rest % nodes[a]);
      rest /= nodes[a];
    }
    evals.push_back(evaluate(family, e, opts));
    if (!evals.back().ok) bd.diagnostics.push_back("node " + std::to_string(k) + " failed: " + evals.back().error);
  }
  auto node_at = [&](const std::vector<std::size_t>& idx) -> const NodeEval& {
    std::size_t k = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) k = k * nodes[a] + idx[a];
    return evals[k];
  };

  const Labeler lab{family, opts, regions};
  std::vector<std::vector<DegeneracyLabel>> node_labels;
  node_labels.reserve(total);
  for (const auto& n : evals) node_labels.push_back(lab.at_node(n));

  std::size_t cells = 1;
  for (std::size_t s : bd.shape) cells *= s;
  for (std::size_t c = 0; c < cells; ++c) {
    DiagramCell cell;
    cell.index.resize(bd.shape.size());
    std::size_t rest = c;
    for (std::size_t a = bd.shape.size(); a-- > 0;) {
      cell.index[a] = rest % bd.shape[a];
      rest /= bd.shape[a];
    }
    // Corners in binary order; edges join corners differing in one bit.
    const std::size_t ncorner = std::size_t{1} << bd.shape.size();
    std::vector<const NodeEval*> corner(ncorner);
    std::vector<std::size_t> corner_key(ncorner);
    for (std::size_t m = 0; m < ncorner; ++m) {
      std::vector<std::size_t> idx = cell.index;
      for (std::size_t a = 0; a < idx.size(); ++a) idx[a] += (m >> (idx.size() - 1 - a)) & 1U;
      corner[m] = &node_at(idx);
      if (!corner[m]->ok) cell.failed = true;
      std::size_t k = 0;
      for (std::size_t a = 0; a < idx.size(); ++a) k = k * nodes[a] + idx[a];
      corner_key[m] = k;
    }
    if (!cell.failed) {
      for (std::size_t m = 0; m < ncorner; ++m) {
        const auto& nl = node_labels[corner_key[m]];
        cell.labels.insert(cell.labels.end(), nl.begin(), nl.end());
      }
      for (std::size_t m = 0; m < ncorner; ++m) {
        for (std::size_t bit = 0; bit < bd.shape.size(); ++bit) {
          const std::size_t other = m | (std::size_t{1} << bit);
          if (other == m) continue;
          const auto el = lab.on_edge(*corner[m], *corner[other]);
          cell.labels.insert(cell.labels.end(), el.begin(), el.end());
        }
      }
      dedupe(cell.labels);
    }
    bd.cells.push_back(std::move(cell));
  }
  assemble_curves(bd);
  return bd;
}

BifurcationDiagram restrict_to_region(const BifurcationDiagram& bd, int region) {
  BifurcationDiagram out = bd;
  out.curves.clear();
  for (auto& c : out.cells) {
    std::erase_if(c.labels, [&](const DegeneracyLabel& l) { return l.region != region; });
  }
  assemble_curves(out);
  return out;
}

std::vector<double> diagram_values(const BifurcationDiagram& bd) {
  if (bd.axes.size() != 1) throw PreconditionError("expected a 1-parameter diagram");
  std::vector<double> out;
  for (const auto& cv : bd.curves) out.push_back(cv.estimate[bd.axes[0]]);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

using CellSet = std::set<std::pair<long, long>>;

bool in_tube(const CellSet& s, std::pair<long, long> c) {
  for (long di = -1; di <= 1; ++di) {
    for (long dj = -1; dj <= 1; ++dj) {
      if (s.count({c.first + di, c.second + dj})) return true;
    }
  }
  return false;
}

std::string cell_name(const BifurcationDiagram& bd, std::pair<long, long> c) {
  const double x = bd.grid.value(bd.axes[0], c.first) + 0.5 * bd.grid.step;
  const double y = bd.grid.value(bd.axes[1], c.second) + 0.5 * bd.grid.step;
  char buf[96];
  std::snprintf(buf, sizeof buf, "cell (%ld, %ld) at eps = (%.6g, %.6g)", c.first, c.second, x, y);
  return buf;
}

// Returns the number of cells outside each other's one-cell tube and lists some.
std::size_t tube_difference(const BifurcationDiagram& bd, const CellSet& have, const CellSet& want,
                            std::vector<std::string>& notes, const std::string& what) {
  std::size_t bad = 0;
  for (const auto& c : have) {
    if (!in_tube(want, c)) {
      if (++bad <= 20) notes.push_back(what + ": extra " + cell_name(bd, c));
    }
  }
  for (const auto& c : want) {
    if (!in_tube(have, c)) {
      if (++bad <= 20) notes.push_back(what + ": missing " + cell_name(bd, c));
    }
  }
  return bad;
}

CellSet labeled_cells(const BifurcationDiagram& bd, int region) {
  CellSet s;
  for (std::size_t c = 0; c < bd.cells.size(); ++c) {
    if (bd.labeled(c, region)) s.insert({static_cast<long>(bd.cells[c].index[0]), static_cast<long>(bd.cells[c].index[1])});
  }
  return s;
}

bool interval_hits(double lo, double hi, const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [&](double x) { return x >= lo - 1e-12 && x <= hi + 1e-12; });
}

}  // namespace

CheckReport compare_with_cross(const BifurcationDiagram& bd, const std::vector<double>& lines1,
                               const std::vector<double>& lines2) {
  if (bd.axes.size() != 2) throw PreconditionError("expected a 2-parameter diagram");
  CheckReport rep;
  rep.check = "cross";
  CellSet cross;
  for (const auto& cell : bd.cells) {
    const double x0 = bd.grid.value(bd.axes[0], cell.index[0]), y0 = bd.grid.value(bd.axes[1], cell.index[1]);
    if (interval_hits(x0, x0 + bd.grid.step, lines1) || interval_hits(y0, y0 + bd.grid.step, lines2)) {
      cross.insert({static_cast<long>(cell.index[0]), static_cast<long>(cell.index[1])});
    }
  }
  const CellSet have = labeled_cells(bd, -2);
  const std::size_t bad = tube_difference(bd, have, cross, rep.notes, "BD vs cross");
  rep.metric = static_cast<double>(bad);
  rep.pass = bad == 0;
  rep.notes.insert(rep.notes.begin(), "labeled cells: " + std::to_string(have.size()) + ", cross cells: " +
                                          std::to_string(cross.size()));
  return rep;
}

CheckReport check_product_structure(const BifurcationDiagram& bd_w, const BifurcationDiagram& bd_v1,
                                    const BifurcationDiagram& bd_v2) {
  const auto l1 = diagram_values(bd_v1);
  const auto l2 = diagram_values(bd_v2);
  CheckReport rep = compare_with_cross(bd_w, l1, l2);
  rep.check = "product-structure";
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return "{" + s + "}";
  };
  rep.notes.insert(rep.notes.begin(), "BD(V1) = " + list(l1) + ", BD(V2) = " + list(l2));
  return rep;
}

CheckReport verify_product_structure(const SplittingData& data, const GridSpec& grid, const DiagramOptions& opts,
                                     BifurcationDiagram* bd_w_out) {
  const FieldFamily w = split_family(data);
  if (w.base_dim() != 2 || data.split_index != 1) throw PreconditionError("product structure needs a 1 + 1 split");
  grid.validate(2);
  BifurcationDiagram bd_w = scan_diagram(w, grid, {data.phi1.support(), data.phi2.support()}, opts);
  auto slice = [&](std::size_t fixed) {
    GridSpec g = grid;
    g.lo[fixed] = g.hi[fixed] = 0.0;
    return g;
  };
  const auto bd_v1 = restrict_to_region(scan_diagram(data.family, slice(1), {data.phi1.support()}, opts), 0);
  const auto bd_v2 = restrict_to_region(scan_diagram(data.family, slice(0), {data.phi2.support()}, opts), 0);
  CheckReport rep = check_product_structure(bd_w, bd_v1, bd_v2);
  if (bd_w_out) *bd_w_out = std::move(bd_w);
  return rep;
}

namespace {

// Cells of the lines {eps_axis = const} touched by s, over the full box.
CellSet lines_through(const BifurcationDiagram& bd, const CellSet& s, int axis) {
  std::set<long> touched;
  for (const auto& c : s) touched.insert(axis == 0 ? c.first : c.second);
  CellSet out;
  for (long t : touched) {
    const long n = static_cast<long>(bd.shape[axis == 0 ? 1 : 0]);
    for (long k = 0; k < n; ++k) out.insert(axis == 0 ? std::make_pair(t, k) : std::make_pair(k, t));
  }
  return out;
}

}  // namespace

CheckReport check_independence(const FieldFamily& family, const Region& u1, const Region& u2, const GridSpec& grid,
                               const DiagramOptions& opts, BifurcationDiagram* bd_out) {
  if (family.base_dim() != 2) throw PreconditionError("independence needs a 2-parameter family");
  if (!u1.disjoint_from(u2)) throw PreconditionError("regions must be disjoint");
  BifurcationDiagram bd = scan_diagram(family, grid, {u1, u2}, opts);
  if (bd.axes.size() != 2) throw PreconditionError("independence needs a 2-parameter grid");
  CheckReport rep;
  rep.check = "independence";
  const bool all_failed = std::all_of(bd.cells.begin(), bd.cells.end(), [](const DiagramCell& c) { return c.failed; });
  if (all_failed) {
    rep.inconclusive = true;
    rep.notes.push_back("inconclusive: every cell failed");
    if (bd_out) *bd_out = std::move(bd);
    return rep;
  }
  const CellSet s1 = labeled_cells(bd, 0), s2 = labeled_cells(bd, 1);
  rep.notes.push_back("BD_U1: " + std::to_string(s1.size()) + " cells, BD_U2: " + std::to_string(s2.size()) + " cells");
  for (int a = 0; a < 2 && !rep.pass; ++a) {
    std::vector<std::string> scratch;
    const std::size_t bad = tube_difference(bd, s1, lines_through(bd, s1, a), scratch, "U1") +
                            tube_difference(bd, s2, lines_through(bd, s2, 1 - a), scratch, "U2");
    if (bad == 0) {
      rep.pass = true;
      rep.notes.push_back(std::string("split: U1 moves with eps_") + (a == 0 ? "1" : "2") + ", U2 with eps_" +
                          (a == 0 ? "2" : "1"));
    }
  }
  if (!rep.pass) {
    std::size_t shown = 0;
    for (const auto& c : s1) {
      if (s2.count(c) && ++shown <= 20) rep.notes.push_back("coincident labels in both regions: " + cell_name(bd, c));
    }
    rep.metric = static_cast<double>(shown);
    rep.notes.push_back("no coordinate split makes the regions bifurcate independently");
  }
  if (bd_out) *bd_out = std::move(bd);
  return rep;
}

StabilityResult check_structural_stability(const FieldFamily& family, const ParamPoint& eps,
                                           const PortraitOptions& opts) {
  StabilityResult r;
  const PhasePortrait pp = compute_portrait(family, eps, opts);
  if (pp.unresolved()) {
    r.diagnostics = pp.diagnostics;
    r.diagnostics.push_back("portrait has unresolved objects");
    return r;
  }
  const auto na = detect_non_andronov(pp);
  for (const auto& el : na) {
    std::string s = to_string(el.kind);
    for (int ref : el.refs) s += " #" + std::to_string(ref);
    r.diagnostics.push_back(s);
  }
  r.stable = na.empty();
  return r;
}

}  // namespace lbs

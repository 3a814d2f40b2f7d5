#include "lbs/geometry.hpp"

#include <algorithm>
#include <limits>

namespace lbs {

std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double disc = 0.25 * tr * tr - m.det();
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Avoid cancellation for the smaller root.
    const double big = 0.5 * tr + (tr >= 0.0 ? s : -s);
    double small = big != 0.0 ? m.det() / big : 0.0;
    double l1 = std::min(big, small), l2 = std::max(big, small);
    return {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(0.5 * tr, -im), std::complex<double>(0.5 * tr, im)};
}

Vec2 eigenvector(const Mat2& m, double lambda) {
  // Rows of (M - lambda I) are orthogonal to the eigenvector; use the larger one.
  const Vec2 r1{m.a - lambda, m.b};
  const Vec2 r2{m.c, m.d - lambda};
  const Vec2 r = norm(r1) >= norm(r2) ? r1 : r2;
  Vec2 v{-r.y, r.x};
  const double n = norm(v);
  if (n == 0.0) return {1.0, 0.0};
  v *= 1.0 / n;
  // Deterministic sign: first nonzero component positive.
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
  return v;
}

Region::Region(Rect r) : shape_(r) {
  if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max)) throw std::invalid_argument("degenerate rectangle");
}

Region::Region(Annulus a) : shape_(a) {
  if (a.r_min < 0.0 || !(a.r_min < a.r_max)) throw std::invalid_argument("annulus requires 0 <= r_min < r_max");
}

bool Region::contains(const Vec2& p) const {
  if (const auto* r = std::get_if<Rect>(&shape_)) {
    return p.x >= r->x_min && p.x <= r->x_max && p.y >= r->y_min && p.y <= r->y_max;
  }
  const auto& a = std::get<Annulus>(shape_);
  const double d = distance(p, a.center);
  return d >= a.r_min && d <= a.r_max;
}

Rect Region::bounds() const {
  if (const auto* r = std::get_if<Rect>(&shape_)) return *r;
  const auto& a = std::get<Annulus>(shape_);
  return {a.center.x - a.r_max, a.center.x + a.r_max, a.center.y - a.r_max, a.center.y + a.r_max};
}

bool Region::strictly_contains(const Region& inner) const {
  if (is_annulus() && inner.is_annulus()) {
    const auto& o = as_annulus();
    const auto& i = inner.as_annulus();
    const double off = distance(o.center, i.center);
    const bool inner_hole_ok = o.r_min == 0.0 || i.r_min - off > o.r_min;
    return inner_hole_ok && i.r_max + off < o.r_max;
  }
  if (!is_annulus() && !inner.is_annulus()) {
    const auto& o = as_rect();
    const auto& i = inner.as_rect();
    return i.x_min > o.x_min && i.x_max < o.x_max && i.y_min > o.y_min && i.y_max < o.y_max;
  }
  if (!is_annulus()) {
    // Box around a disk/annulus: compare against the annulus bounding box.
    const Rect b = inner.bounds();
    const auto& o = as_rect();
    return b.x_min > o.x_min && b.x_max < o.x_max && b.y_min > o.y_min && b.y_max < o.y_max;
  }
  // Annulus around a box: every box corner strictly inside the annulus shell and
  // the box must not straddle the hole.
  const auto& o = as_annulus();
  const auto& i = inner.as_rect();
  const std::array<Vec2, 4> corners{Vec2{i.x_min, i.y_min}, Vec2{i.x_max, i.y_min}, Vec2{i.x_min, i.y_max},
                                    Vec2{i.x_max, i.y_max}};
  for (const auto& c : corners) {
    if (distance(c, o.center) >= o.r_max) return false;
  }
  if (o.r_min > 0.0) {
    const double cx = std::clamp(o.center.x, i.x_min, i.x_max);
    const double cy = std::clamp(o.center.y, i.y_min, i.y_max);
    if (distance(Vec2{cx, cy}, o.center) <= o.r_min) return false;
  }
  return true;
}

bool Region::disjoint_from(const Region& other) const {
  if (is_annulus() && other.is_annulus()) {
    const auto& a = as_annulus();
    const auto& b = other.as_annulus();
    const double off = distance(a.center, b.center);
    if (off == 0.0) return a.r_max < b.r_min || b.r_max < a.r_min;
    return off > a.r_max + b.r_max;
  }
  const Rect ra = bounds();
  const Rect rb = other.bounds();
  if (ra.x_max < rb.x_min || rb.x_max < ra.x_min || ra.y_max < rb.y_min || rb.y_max < ra.y_min) return true;
  // Box fully in the hole of an annulus.
  auto box_in_hole = [](const Annulus& an, const Rect& r) {
    const std::array<Vec2, 4> corners{Vec2{r.x_min, r.y_min}, Vec2{r.x_max, r.y_min}, Vec2{r.x_min, r.y_max},
                                      Vec2{r.x_max, r.y_max}};
    return std::all_of(corners.begin(), corners.end(),
                       [&](const Vec2& c) { return distance(c, an.center) < an.r_min; });
  };
  if (is_annulus() && !other.is_annulus()) return box_in_hole(as_annulus(), other.as_rect());
  if (!is_annulus() && other.is_annulus()) return box_in_hole(other.as_annulus(), as_rect());
  return false;
}

bool point_in_polygon(const Polyline& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

Polyline resample(const Polyline& poly, double spacing) {
  Polyline out;
  if (poly.empty()) return out;
  out.push_back(poly.front());
  for (std::size_t i = 1; i < poly.size(); ++i) {
    const Vec2 a = poly[i - 1];
    const Vec2 b = poly[i];
    const double len = distance(a, b);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 1; k <= pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

double directed_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, distance(p, q));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() && b.empty()) return 0.0;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

PointIndex::PointIndex(std::span<const Vec2> points, double cell)
    : points_(points.begin(), points.end()), cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("PointIndex cell must be positive");
  sorted_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const long bi = static_cast<long>(std::floor(points_[i].x / cell_));
    const long bj = static_cast<long>(std::floor(points_[i].y / cell_));
    sorted_.emplace_back(key(bi, bj), i);
  }
  std::sort(sorted_.begin(), sorted_.end());
}

long PointIndex::key(long i, long j) const { return (i + (1L << 20)) * (1L << 21) + (j + (1L << 20)); }

std::vector<std::size_t> PointIndex::within(const Vec2& q, double radius) const {
  std::vector<std::size_t> out;
  const long ci = static_cast<long>(std::floor(q.x / cell_));
  const long cj = static_cast<long>(std::floor(q.y / cell_));
  const long reach = static_cast<long>(std::ceil(radius / cell_));
  for (long i = ci - reach; i <= ci + reach; ++i) {
    for (long j = cj - reach; j <= cj + reach; ++j) {
      const long k = key(i, j);
      auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(k, std::size_t{0}));
      for (auto it = lo; it != sorted_.end() && it->first == k; ++it) {
        if (distance(points_[it->second], q) <= radius) out.push_back(it->second);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool PointIndex::any_within(const Vec2& q, double radius) const {
  const long ci = static_cast<long>(std::floor(q.x / cell_));
  const long cj = static_cast<long>(std::floor(q.y / cell_));
  const long reach = static_cast<long>(std::ceil(radius / cell_));
  for (long i = ci - reach; i <= ci + reach; ++i) {
    for (long j = cj - reach; j <= cj + reach; ++j) {
      const long k = key(i, j);
      auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(k, std::size_t{0}));
      for (auto it = lo; it != sorted_.end() && it->first == k; ++it) {
        if (distance(points_[it->second], q) <= radius) return true;
      }
    }
  }
  return false;
}

double PointIndex::nearest_distance(const Vec2& q) const {
  if (points_.empty()) return std::numeric_limits<double>::infinity();
  for (double r = cell_; r <= 16.0 * cell_; r *= 2.0) {
    const auto hits = within(q, r);
    if (!hits.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (auto i : hits) best = std::min(best, distance(points_[i], q));
      return best;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) best = std::min(best, distance(p, q));
  return best;
}

}  // namespace lbs

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lbs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

/// Eigenvalues of a real 2x2 matrix, ordered by ascending real part
/// (ascending imaginary part for a complex pair).
std::array<std::complex<double>, 2> eigenvalues(const Mat2& m);

/// Unit eigenvector for a real eigenvalue.
Vec2 eigenvector(const Mat2& m, double lambda);

struct Rect {
  double x_min, x_max, y_min, y_max;
};

/// Annulus {r_min <= |p - center| <= r_max}; r_min = 0 is a disk.
struct Annulus {
  Vec2 center;
  double r_min, r_max;
};

class Region {
 public:
  Region(Rect r);
  Region(Annulus a);

  static Region rect(double x_min, double x_max, double y_min, double y_max) {
    return Region(Rect{x_min, x_max, y_min, y_max});
  }
  static Region annulus(double r_min, double r_max, Vec2 center = {}) {
    return Region(Annulus{center, r_min, r_max});
  }
  static Region disk(double r_max, Vec2 center = {}) { return annulus(0.0, r_max, center); }

  bool contains(const Vec2& p) const;
  bool is_annulus() const { return std::holds_alternative<Annulus>(shape_); }
  const Rect& as_rect() const { return std::get<Rect>(shape_); }
  const Annulus& as_annulus() const { return std::get<Annulus>(shape_); }

  /// Axis-aligned bounding box.
  Rect bounds() const;

  /// True if `inner` lies in the interior of this region with a positive margin.
  bool strictly_contains(const Region& inner) const;

  /// Conservative disjointness test (exact for concentric annuli and for boxes).
  bool disjoint_from(const Region& other) const;

 private:
  std::variant<Rect, Annulus> shape_;
};

using Polyline = std::vector<Vec2>;

/// Even-odd point-in-polygon test for a closed polyline.
bool point_in_polygon(const Polyline& poly, const Vec2& p);

/// Points along the polyline with spacing at most `spacing`.
Polyline resample(const Polyline& poly, double spacing);

/// Directed Hausdorff distance sup_{a in A} inf_{b in B} |a - b| (brute force).
double directed_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

/// Uniform-grid bucket index for radius queries over a fixed point set.
class PointIndex {
 public:
  PointIndex(std::span<const Vec2> points, double cell);

  /// Indices of points within `radius` of `q`, ascending.
  std::vector<std::size_t> within(const Vec2& q, double radius) const;
  bool any_within(const Vec2& q, double radius) const;
  double nearest_distance(const Vec2& q) const;
  std::size_t size() const { return points_.size(); }

 private:
  long key(long i, long j) const;
  std::vector<Vec2> points_;
  double cell_;
  std::vector<std::pair<long, std::size_t>> sorted_;  // (bucket key, point index)
};

}  // namespace lbs

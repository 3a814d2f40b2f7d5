#include "lbs/field_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lbs {

namespace {

constexpr std::size_t kMaxBaseDim = 8;

using ParamBuffer = std::array<double, kMaxBaseDim>;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients c[j] of t^(order+1+j), j = 0..order.
std::vector<double> compute_smoothstep_coefficients(int order) {
  std::vector<double> c(order + 1);
  for (int n = 0; n <= order; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    c[n] = sign * binomial(order + n, n) * binomial(2 * order + 1, order - n);
  }
  return c;
}

// Evaluated inside integration loops, so memoized per order.
const std::vector<double>& smoothstep_coefficients(int order) {
  thread_local std::vector<std::vector<double>> cache;
  if (cache.size() <= static_cast<std::size_t>(order)) cache.resize(order + 1);
  auto& c = cache[order];
  if (c.empty()) c = compute_smoothstep_coefficients(order);
  return c;
}

double exp_blend_f(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

Mat2 outer(const Vec2& v, const Vec2& g) { return {v.x * g.x, v.x * g.y, v.y * g.x, v.y * g.y}; }
Mat2 add(const Mat2& m, const Mat2& n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
Mat2 sub(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
Mat2 scale(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

// Radial-rotational field x' = -y + x G(s), y' = x + y G(s), s = x^2 + y^2,
// i.e. r' = r G(r^2), theta' = 1.
using RadialFn = std::function<double(std::span<const double>, double)>;

FamilySpec radial_spec(std::string name, std::size_t base_dim, ChartDomain domain, RadialFn g, RadialFn g_s) {
  FamilySpec spec;
  spec.name = std::move(name);
  spec.base_dim = base_dim;
  spec.domains = {std::move(domain)};
  spec.smoothness = 3;
  spec.eval = [g](std::span<const double> eps, const Vec2& p) {
    const double G = g(eps, p.x * p.x + p.y * p.y);
    return Vec2{-p.y + p.x * G, p.x + p.y * G};
  };
  spec.jacobian = [g, g_s](std::span<const double> eps, const Vec2& p) {
    const double s = p.x * p.x + p.y * p.y;
    const double G = g(eps, s);
    const double Gs = g_s(eps, s);
    return Mat2{G + 2.0 * p.x * p.x * Gs, -1.0 + 2.0 * p.x * p.y * Gs, 1.0 + 2.0 * p.x * p.y * Gs,
                G + 2.0 * p.y * p.y * Gs};
  };
  return spec;
}

Section ray_section(double r_lo, double r_hi) {
  return Section{{0.5 * (r_lo + r_hi), 0.0}, {1.0, 0.0}, 0.5 * (r_hi - r_lo), 1};
}

}  // namespace

double ParamPoint::sup_norm() const {
  double m = 0.0;
  for (double c : coords) m = std::max(m, std::abs(c));
  return m;
}

FieldFamily::FieldFamily(FamilySpec spec) {
  if (spec.base_dim == 0 || spec.base_dim > kMaxBaseDim) throw PreconditionError("base_dim must be in 1..8");
  if (!(spec.base_radius > 0.0)) throw PreconditionError("base_radius must be positive");
  if (spec.domains.empty()) throw PreconditionError("family needs at least one chart domain");
  if (!spec.eval) throw PreconditionError("family needs an evaluation function");
  if (spec.smoothness < 2) throw PreconditionError("smoothness must be at least 2");
  spec_ = std::make_shared<const FamilySpec>(std::move(spec));
}

bool FieldFamily::contains(const Vec2& p) const {
  return std::any_of(spec_->domains.begin(), spec_->domains.end(),
                     [&](const ChartDomain& d) { return d.region.contains(p); });
}

void FieldFamily::require_in_domain(const Vec2& p) const {
  if (!contains(p)) {
    throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside the domain of " +
                      name());
  }
}

void FieldFamily::require_dim(const ParamPoint& eps) const {
  if (eps.size() != base_dim()) {
    throw PreconditionError("parameter dimension " + std::to_string(eps.size()) + " does not match base_dim " +
                            std::to_string(base_dim()) + " of " + name());
  }
}

Vec2 FieldFamily::eval(const ParamPoint& eps, const Vec2& p) const {
  require_dim(eps);
  require_in_domain(p);
  return spec_->eval(eps.coords, p);
}

Mat2 FieldFamily::jacobian(const ParamPoint& eps, const Vec2& p) const {
  require_dim(eps);
  require_in_domain(p);
  return jacobian_raw(eps.coords, p);
}

Mat2 FieldFamily::jacobian_raw(std::span<const double> eps, const Vec2& p) const {
  if (spec_->jacobian) return spec_->jacobian(eps, p);
  const double h = 1e-6;
  const Vec2 dx = (spec_->eval(eps, p + Vec2{h, 0.0}) - spec_->eval(eps, p - Vec2{h, 0.0})) * (0.5 / h);
  const Vec2 dy = (spec_->eval(eps, p + Vec2{0.0, h}) - spec_->eval(eps, p - Vec2{0.0, h})) * (0.5 / h);
  return {dx.x, dy.x, dx.y, dy.y};
}

Mat2 FieldFamily::jacobian_fd(const ParamPoint& eps, const Vec2& p, double step) const {
  require_dim(eps);
  const Vec2 dx = (spec_->eval(eps.coords, p + Vec2{step, 0.0}) - spec_->eval(eps.coords, p - Vec2{step, 0.0})) *
                  (0.5 / step);
  const Vec2 dy = (spec_->eval(eps.coords, p + Vec2{0.0, step}) - spec_->eval(eps.coords, p - Vec2{0.0, step})) *
                  (0.5 / step);
  return {dx.x, dy.x, dx.y, dy.y};
}

FieldFamily FieldFamily::renamed(std::string name) const {
  FamilySpec copy = *spec_;
  copy.name = std::move(name);
  return FieldFamily(std::move(copy));
}

// ---------------------------------------------------------------------------
// Cut functions

double smoothstep(int order, double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (order == kSmoothInfinity) {
    const double a = exp_blend_f(t);
    const double b = exp_blend_f(1.0 - t);
    return a / (a + b);
  }
  const auto& c = smoothstep_coefficients(order);
  double poly = 0.0;
  for (int j = order; j >= 0; --j) poly = poly * t + c[j];
  return std::pow(t, order + 1) * poly;
}

double smoothstep_derivative(int order, double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  if (order == kSmoothInfinity) {
    const double a = exp_blend_f(t);
    const double b = exp_blend_f(1.0 - t);
    const double da = a / (t * t);
    const double db = b / ((1.0 - t) * (1.0 - t));
    return (da * b + a * db) / ((a + b) * (a + b));
  }
  const auto& c = smoothstep_coefficients(order);
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) sum += c[j] * (order + 1 + j) * std::pow(t, order + j);
  return sum;
}

int default_cut_order(int k) { return k == kSmoothInfinity ? 3 : std::max(3, k + 1); }

CutFunction::CutFunction(Region core, Region support, int smooth_order)
    : core_(std::move(core)), support_(std::move(support)), order_(smooth_order) {
  if (smooth_order < 2) throw PreconditionError("cut function smooth_order must be at least 2");
  if (core_.is_annulus() != support_.is_annulus()) throw RegionError("core and support must have the same shape");
  if (core_.is_annulus()) {
    const auto& c = core_.as_annulus();
    const auto& s = support_.as_annulus();
    if (!(c.center == s.center)) throw RegionError("annular core and support must be concentric");
    const bool hole_ok = (c.r_min == 0.0 && s.r_min == 0.0) || s.r_min < c.r_min;
    if (!hole_ok || !(c.r_max < s.r_max)) throw RegionError("core must lie strictly inside support");
  } else {
    const auto& c = core_.as_rect();
    const auto& s = support_.as_rect();
    if (!(s.x_min < c.x_min && c.x_max < s.x_max && s.y_min < c.y_min && c.y_max < s.y_max)) {
      throw RegionError("core must lie strictly inside support");
    }
  }
}

std::pair<double, double> CutFunction::edge(double t, double lo, double hi, bool rising) const {
  const double w = hi - lo;
  const double u = (t - lo) / w;
  if (rising) return {smoothstep(order_, u), smoothstep_derivative(order_, u) / w};
  return {smoothstep(order_, 1.0 - u), -smoothstep_derivative(order_, 1.0 - u) / w};
}

double CutFunction::eval(const Vec2& p) const {
  if (core_.is_annulus()) {
    const auto& c = core_.as_annulus();
    const auto& s = support_.as_annulus();
    const double r = distance(p, c.center);
    if (r >= s.r_max || r <= s.r_min) return (r <= s.r_min && s.r_min == 0.0 && c.r_min == 0.0) ? 1.0 : 0.0;
    double v = 1.0;
    if (c.r_min > 0.0 && r < c.r_min) v *= edge(r, s.r_min, c.r_min, true).first;
    if (r > c.r_max) v *= edge(r, c.r_max, s.r_max, false).first;
    return v;
  }
  const auto& c = core_.as_rect();
  const auto& s = support_.as_rect();
  auto axis = [&](double t, double slo, double clo, double chi, double shi) {
    if (t <= slo || t >= shi) return 0.0;
    if (t < clo) return edge(t, slo, clo, true).first;
    if (t > chi) return edge(t, chi, shi, false).first;
    return 1.0;
  };
  return axis(p.x, s.x_min, c.x_min, c.x_max, s.x_max) * axis(p.y, s.y_min, c.y_min, c.y_max, s.y_max);
}

Vec2 CutFunction::gradient(const Vec2& p) const {
  if (core_.is_annulus()) {
    const auto& c = core_.as_annulus();
    const auto& s = support_.as_annulus();
    const Vec2 d = p - c.center;
    const double r = norm(d);
    if (r >= s.r_max || r <= s.r_min || r == 0.0) return {};
    double v_in = 1.0, dv_in = 0.0, v_out = 1.0, dv_out = 0.0;
    if (c.r_min > 0.0 && r < c.r_min) std::tie(v_in, dv_in) = edge(r, s.r_min, c.r_min, true);
    if (r > c.r_max) std::tie(v_out, dv_out) = edge(r, c.r_max, s.r_max, false);
    const double dr = dv_in * v_out + v_in * dv_out;
    return d * (dr / r);
  }
  const auto& c = core_.as_rect();
  const auto& s = support_.as_rect();
  auto axis = [&](double t, double slo, double clo, double chi, double shi) -> std::pair<double, double> {
    if (t <= slo || t >= shi) return {0.0, 0.0};
    if (t < clo) return edge(t, slo, clo, true);
    if (t > chi) return edge(t, chi, shi, false);
    return {1.0, 0.0};
  };
  const auto [fx, dfx] = axis(p.x, s.x_min, c.x_min, c.x_max, s.x_max);
  const auto [fy, dfy] = axis(p.y, s.y_min, c.y_min, c.y_max, s.y_max);
  return {dfx * fy, fx * dfy};
}

CutFunction make_bump(const Region& core, const Region& support, int smooth_order) {
  return CutFunction(core, support, smooth_order);
}

void SplittingData::validate(int samples_per_axis) const {
  if (split_index == 0 || split_index >= family.base_dim()) {
    throw PreconditionError("split_index must leave both parameter blocks nonempty");
  }
  Rect box = family.domain().region.bounds();
  for (const auto* r : {&phi1.support(), &phi2.support()}) {
    const Rect b = r->bounds();
    box = {std::min(box.x_min, b.x_min), std::max(box.x_max, b.x_max), std::min(box.y_min, b.y_min),
           std::max(box.y_max, b.y_max)};
  }
  const int n = samples_per_axis;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p{box.x_min + (box.x_max - box.x_min) * i / (n - 1),
                   box.y_min + (box.y_max - box.y_min) * j / (n - 1)};
      if (phi1.eval(p) > 0.0 && phi2.eval(p) > 0.0) {
        throw PreconditionError("cut function supports overlap near (" + std::to_string(p.x) + ", " +
                                std::to_string(p.y) + ")");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Family surgeries

FieldFamily split_family(const SplittingData& data) {
  data.validate();
  const FieldFamily v = data.family;
  const std::size_t n = v.base_dim();
  const std::size_t k = data.split_index;
  const CutFunction phi1 = data.phi1;
  const CutFunction phi2 = data.phi2;

  FamilySpec spec = v.spec();
  spec.name = "split(" + v.name() + ")";
  spec.smoothness = std::min(v.smoothness(), std::min(phi1.smooth_order(), phi2.smooth_order()));
  // p1 keeps the first k coordinates, p2 the rest; the other block is zeroed.
  auto project = [n, k](std::span<const double> eps, bool first) {
    ParamBuffer buf{};
    for (std::size_t i = 0; i < n; ++i) buf[i] = ((i < k) == first) ? eps[i] : 0.0;
    return buf;
  };
  spec.eval = [v, n, phi1, phi2, project](std::span<const double> eps, const Vec2& p) {
    const ParamBuffer zero{};
    const Vec2 v0 = v.eval_raw(std::span<const double>(zero.data(), n), p);
    Vec2 w = v0;
    const double f1 = phi1.eval(p);
    const double f2 = phi2.eval(p);
    if (f1 != 0.0) {
      const auto e1 = project(eps, true);
      w += f1 * (v.eval_raw(std::span<const double>(e1.data(), n), p) - v0);
    }
    if (f2 != 0.0) {
      const auto e2 = project(eps, false);
      w += f2 * (v.eval_raw(std::span<const double>(e2.data(), n), p) - v0);
    }
    return w;
  };
  spec.jacobian = [v, n, phi1, phi2, project](std::span<const double> eps, const Vec2& p) {
    const ParamBuffer zero{};
    const std::span<const double> z(zero.data(), n);
    const Vec2 v0 = v.eval_raw(z, p);
    const Mat2 j0 = v.jacobian_raw(z, p);
    Mat2 jw = j0;
    const std::array<std::pair<const CutFunction*, bool>, 2> parts{{{&phi1, true}, {&phi2, false}}};
    for (const auto& [phi, first] : parts) {
      const double f = phi->eval(p);
      const Vec2 g = phi->gradient(p);
      if (f == 0.0 && g.x == 0.0 && g.y == 0.0) continue;
      const auto e = project(eps, first);
      const std::span<const double> es(e.data(), n);
      const Vec2 dv = v.eval_raw(es, p) - v0;
      jw = add(jw, add(scale(f, sub(v.jacobian_raw(es, p), j0)), outer(dv, g)));
    }
    return jw;
  };
  return FieldFamily(std::move(spec));
}

FieldFamily stabilize(const FieldFamily& family, const CutFunction& phi) {
  const FieldFamily v = family;
  const std::size_t n = v.base_dim();
  FamilySpec spec = v.spec();
  spec.name = "stab(" + v.name() + ")";
  spec.smoothness = std::min(v.smoothness(), phi.smooth_order());
  spec.eval = [v, n, phi](std::span<const double> eps, const Vec2& p) {
    const ParamBuffer zero{};
    const Vec2 v0 = v.eval_raw(std::span<const double>(zero.data(), n), p);
    const double f = phi.eval(p);
    if (f == 0.0) return v0;
    return v0 + f * (v.eval_raw(eps, p) - v0);
  };
  spec.jacobian = [v, n, phi](std::span<const double> eps, const Vec2& p) {
    const ParamBuffer zero{};
    const std::span<const double> z(zero.data(), n);
    const Mat2 j0 = v.jacobian_raw(z, p);
    const double f = phi.eval(p);
    const Vec2 g = phi.gradient(p);
    if (f == 0.0 && g.x == 0.0 && g.y == 0.0) return j0;
    const Vec2 dv = v.eval_raw(eps, p) - v.eval_raw(z, p);
    return add(j0, add(scale(f, sub(v.jacobian_raw(eps, p), j0)), outer(dv, g)));
  };
  return FieldFamily(std::move(spec));
}

FieldFamily extend_trivially(const FieldFamily& family, std::size_t extra_dims) {
  if (extra_dims < 1) throw PreconditionError("extend_trivially needs at least one extra dimension");
  const FieldFamily v = family;
  const std::size_t n = v.base_dim();
  FamilySpec spec = v.spec();
  spec.name = "ext(" + v.name() + ")";
  spec.base_dim = n + extra_dims;
  spec.eval = [v, n](std::span<const double> eps, const Vec2& p) { return v.eval_raw(eps.first(n), p); };
  spec.jacobian = [v, n](std::span<const double> eps, const Vec2& p) { return v.jacobian_raw(eps.first(n), p); };
  return FieldFamily(std::move(spec));
}

// ---------------------------------------------------------------------------
// Builtin models

std::string to_string(BasicKind k) {
  switch (k) {
    case BasicKind::AH: return "AH";
    case BasicKind::SN: return "SN";
    case BasicKind::HC: return "HC";
    case BasicKind::SC: return "SC";
    case BasicKind::SL: return "SL";
    case BasicKind::PC: return "PC";
  }
  return "?";
}

BasicKind basic_kind_from_string(const std::string& s) {
  for (auto k : {BasicKind::AH, BasicKind::SN, BasicKind::HC, BasicKind::SC, BasicKind::SL, BasicKind::PC}) {
    if (to_string(k) == s) return k;
  }
  throw UnsupportedModel("unknown basic model kind: " + s);
}

FieldFamily model_two_parabolic_cycles() {
  auto g = [](std::span<const double> e, double s) {
    return (e[0] + (s - 1.0) * (s - 1.0)) * (e[1] + (s - 4.0) * (s - 4.0));
  };
  auto g_s = [](std::span<const double> e, double s) {
    return 2.0 * (s - 1.0) * (e[1] + (s - 4.0) * (s - 4.0)) + (e[0] + (s - 1.0) * (s - 1.0)) * 2.0 * (s - 4.0);
  };
  FamilySpec spec = radial_spec("two_parabolic_cycles", 2,
                                ChartDomain{"disk3", Region::disk(3.0), BoundaryBehavior::outflow}, g, g_s);
  spec.sections = {ray_section(0.05, 2.95)};
  return FieldFamily(std::move(spec));
}

FieldFamily model_synchronized_cycles() {
  const FieldFamily two = model_two_parabolic_cycles();
  FamilySpec diag = two.spec();
  diag.name = "diagonal(two_parabolic_cycles)";
  diag.base_dim = 1;
  diag.eval = [two](std::span<const double> e, const Vec2& p) {
    const std::array<double, 2> ee{e[0], e[0]};
    return two.eval_raw(ee, p);
  };
  diag.jacobian = [two](std::span<const double> e, const Vec2& p) {
    const std::array<double, 2> ee{e[0], e[0]};
    return two.jacobian_raw(ee, p);
  };
  return extend_trivially(FieldFamily(std::move(diag)), 1).renamed("synchronized_cycles");
}

FieldFamily model_basic(BasicKind kind) {
  switch (kind) {
    case BasicKind::AH: {
      auto g = [](std::span<const double> e, double s) { return e[0] - s; };
      auto g_s = [](std::span<const double>, double) { return -1.0; };
      FamilySpec spec =
          radial_spec("AH", 1, ChartDomain{"disk1", Region::disk(1.0), BoundaryBehavior::inflow}, g, g_s);
      spec.sections = {ray_section(0.02, 0.98)};
      return FieldFamily(std::move(spec));
    }
    case BasicKind::PC: {
      auto g = [](std::span<const double> e, double s) { return e[0] + (s - 1.0) * (s - 1.0); };
      auto g_s = [](std::span<const double>, double s) { return 2.0 * (s - 1.0); };
      FamilySpec spec =
          radial_spec("PC", 1, ChartDomain{"disk2", Region::disk(2.0), BoundaryBehavior::outflow}, g, g_s);
      spec.sections = {ray_section(0.05, 1.95)};
      return FieldFamily(std::move(spec));
    }
    case BasicKind::SN: {
      FamilySpec spec;
      spec.name = "SN";
      spec.base_dim = 1;
      spec.smoothness = 3;
      spec.domains = {ChartDomain{"box1", Region::rect(-1.0, 1.0, -1.0, 1.0), BoundaryBehavior::unspecified}};
      spec.eval = [](std::span<const double> e, const Vec2& p) { return Vec2{e[0] + p.x * p.x, -p.y}; };
      spec.jacobian = [](std::span<const double>, const Vec2& p) { return Mat2{2.0 * p.x, 0.0, 0.0, -1.0}; };
      return FieldFamily(std::move(spec));
    }
    case BasicKind::SC: {
      // Saddles at (-1, eps) and (1, -eps); the segment y = 0 connects them at eps = 0.
      FamilySpec spec;
      spec.name = "SC";
      spec.base_dim = 1;
      spec.smoothness = 3;
      spec.domains = {ChartDomain{"box", Region::rect(-2.0, 2.0, -1.5, 1.5), BoundaryBehavior::unspecified}};
      spec.eval = [](std::span<const double> e, const Vec2& p) { return Vec2{1.0 - p.x * p.x, p.x * p.y + e[0]}; };
      spec.jacobian = [](std::span<const double>, const Vec2& p) { return Mat2{-2.0 * p.x, 0.0, p.y, p.x}; };
      spec.probes = {ConnectionProbe{"heteroclinic", {-1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0},
                                     Section{{0.0, 0.0}, {0.0, 1.0}, 0.5, -1}}};
      return FieldFamily(std::move(spec));
    }
    case BasicKind::SL: {
      // The nodal cubic y^2 = x^2 (1 - x) is invariant at eps = 0 (cofactor 0.6 (x - 2/3)).
      FamilySpec spec;
      spec.name = "SL";
      spec.base_dim = 1;
      spec.smoothness = 3;
      spec.domains = {ChartDomain{"box", Region::rect(-0.5, 1.5, -0.8, 0.8), BoundaryBehavior::unspecified}};
      spec.eval = [](std::span<const double> e, const Vec2& p) {
        return Vec2{p.y + 0.2 * (p.x * p.x - p.x), p.x - 1.5 * p.x * p.x + 0.3 * p.x * p.y - 0.2 * p.y + e[0]};
      };
      spec.jacobian = [](std::span<const double>, const Vec2& p) {
        return Mat2{0.4 * p.x - 0.2, 1.0, 1.0 - 3.0 * p.x + 0.3 * p.y, 0.3 * p.x - 0.2};
      };
      // Ray from the interior focus across the loop; the flow crosses it downward.
      spec.sections = {Section{{1.03, 2.0 / 90.0}, {1.0, 0.0}, 0.36, -1}};
      spec.probes = {ConnectionProbe{"loop", {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0},
                                     Section{{0.5, -0.35}, {0.0, 1.0}, 0.3, 1}}};
      return FieldFamily(std::move(spec));
    }
    case BasicKind::HC:
      throw UnsupportedModel("HC (homoclinic of a saddle-node) has no builtin model");
  }
  throw UnsupportedModel("unknown basic kind");
}

FieldFamily model_logistic_cycle() {
  auto g = [](std::span<const double>, double s) { return 1.0 - std::sqrt(s); };
  auto g_s = [](std::span<const double>, double s) { return s > 0.0 ? -0.5 / std::sqrt(s) : 0.0; };
  FamilySpec spec = radial_spec("logistic_cycle", 1,
                                ChartDomain{"disk2", Region::disk(2.0), BoundaryBehavior::inflow}, g, g_s);
  spec.smoothness = 2;
  spec.sections = {ray_section(0.05, 1.95)};
  return FieldFamily(std::move(spec));
}

FieldFamily model_linear_sink() {
  FamilySpec spec;
  spec.name = "linear_sink";
  spec.domains = {ChartDomain{"box2", Region::rect(-2.0, 2.0, -2.0, 2.0), BoundaryBehavior::inflow}};
  spec.eval = [](std::span<const double>, const Vec2& p) { return Vec2{-p.x, -p.y}; };
  spec.jacobian = [](std::span<const double>, const Vec2&) { return Mat2{-1.0, 0.0, 0.0, -1.0}; };
  return FieldFamily(std::move(spec));
}

FieldFamily model_linear_center() {
  FamilySpec spec;
  spec.name = "linear_center";
  spec.domains = {ChartDomain{"disk2", Region::disk(2.0), BoundaryBehavior::invariant}};
  spec.eval = [](std::span<const double>, const Vec2& p) { return Vec2{-p.y, p.x}; };
  spec.jacobian = [](std::span<const double>, const Vec2&) { return Mat2{0.0, -1.0, 1.0, 0.0}; };
  spec.sections = {ray_section(0.1, 1.9)};
  return FieldFamily(std::move(spec));
}

FieldFamily model_linear_saddle() {
  FamilySpec spec;
  spec.name = "linear_saddle";
  spec.domains = {ChartDomain{"box1", Region::rect(-1.0, 1.0, -1.0, 1.0), BoundaryBehavior::unspecified}};
  spec.eval = [](std::span<const double>, const Vec2& p) { return Vec2{p.x, -p.y}; };
  spec.jacobian = [](std::span<const double>, const Vec2&) { return Mat2{1.0, 0.0, 0.0, -1.0}; };
  return FieldFamily(std::move(spec));
}

std::vector<std::string> builtin_names() {
  return {"two_parabolic_cycles", "synchronized_cycles", "AH", "SN", "SL", "SC", "PC",
          "logistic_cycle", "linear_sink", "linear_center", "linear_saddle"};
}

FieldFamily builtin_family(const std::string& name) {
  if (name == "two_parabolic_cycles") return model_two_parabolic_cycles();
  if (name == "synchronized_cycles") return model_synchronized_cycles();
  if (name == "logistic_cycle") return model_logistic_cycle();
  if (name == "linear_sink") return model_linear_sink();
  if (name == "linear_center") return model_linear_center();
  if (name == "linear_saddle") return model_linear_saddle();
  return model_basic(basic_kind_from_string(name));
}

}  // namespace lbs

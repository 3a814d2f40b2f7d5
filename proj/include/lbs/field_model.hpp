#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbs/errors.hpp"
#include "lbs/geometry.hpp"

namespace lbs {

enum class BoundaryBehavior { outflow, inflow, invariant, unspecified };

struct ChartDomain {
  std::string id;
  Region region;
  BoundaryBehavior boundary = BoundaryBehavior::unspecified;
};

/// Parameter value epsilon; the dimension must equal the family's base dimension.
struct ParamPoint {
  std::vector<double> coords;

  ParamPoint() = default;
  explicit ParamPoint(std::vector<double> c) : coords(std::move(c)) {}
  ParamPoint(std::initializer_list<double> c) : coords(c) {}
  static ParamPoint zero(std::size_t n) { return ParamPoint(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }
  double sup_norm() const;
  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

/// Transversal segment {base + s * direction : |s| <= half_length}. Crossings
/// count when the field's component along the left normal of `direction`
/// has the sign of `orientation`.
struct Section {
  Vec2 base;
  Vec2 direction{1.0, 0.0};
  double half_length = 1.0;
  int orientation = 1;

  Vec2 point(double s) const { return base + s * direction; }
  Vec2 normal() const { return {-direction.y, direction.x}; }
  double coordinate(const Vec2& p) const { return dot(p - base, direction); }
  double offset(const Vec2& p) const { return dot(p - base, normal()); }
};

/// Designated separatrix pair whose splitting along `crossing` measures a
/// saddle connection (same saddle: loop; different saddles: connection).
struct ConnectionProbe {
  std::string id;
  Vec2 unstable_saddle;  // seed for Newton
  Vec2 unstable_hint;    // picks the branch: positive dot with the eigenvector
  Vec2 stable_saddle;
  Vec2 stable_hint;
  Section crossing;
};

inline constexpr int kSmoothInfinity = std::numeric_limits<int>::max();

using EvalFn = std::function<Vec2(std::span<const double> eps, const Vec2& p)>;
using JacobianFn = std::function<Mat2(std::span<const double> eps, const Vec2& p)>;

struct FamilySpec {
  std::string name;
  std::size_t base_dim = 1;
  double base_radius = 0.1;
  std::vector<ChartDomain> domains;
  EvalFn eval;
  JacobianFn jacobian;  // optional; central differences otherwise
  int smoothness = kSmoothInfinity;
  std::vector<Section> sections;
  std::vector<ConnectionProbe> probes;
};

/// Immutable handle to a parameterized family of planar vector fields.
class FieldFamily {
 public:
  explicit FieldFamily(FamilySpec spec);

  const std::string& name() const { return spec_->name; }
  std::size_t base_dim() const { return spec_->base_dim; }
  double base_radius() const { return spec_->base_radius; }
  const std::vector<ChartDomain>& domains() const { return spec_->domains; }
  const ChartDomain& domain() const { return spec_->domains.front(); }
  int smoothness() const { return spec_->smoothness; }
  const std::vector<Section>& sections() const { return spec_->sections; }
  const std::vector<ConnectionProbe>& probes() const { return spec_->probes; }
  bool has_analytic_jacobian() const { return static_cast<bool>(spec_->jacobian); }
  const FamilySpec& spec() const { return *spec_; }

  bool contains(const Vec2& p) const;
  void require_in_domain(const Vec2& p) const;
  void require_dim(const ParamPoint& eps) const;

  Vec2 eval(const ParamPoint& eps, const Vec2& p) const;
  Mat2 jacobian(const ParamPoint& eps, const Vec2& p) const;
  Mat2 jacobian_fd(const ParamPoint& eps, const Vec2& p, double step = 1e-6) const;

  /// Unchecked evaluation for inner integration loops.
  Vec2 eval_raw(std::span<const double> eps, const Vec2& p) const { return spec_->eval(eps, p); }
  Mat2 jacobian_raw(std::span<const double> eps, const Vec2& p) const;

  FieldFamily renamed(std::string name) const;

 private:
  std::shared_ptr<const FamilySpec> spec_;
};

/// Smooth cut function: 1 on `core`, 0 outside `support`.
class CutFunction {
 public:
  CutFunction(Region core, Region support, int smooth_order);

  double eval(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
  const Region& core() const { return core_; }
  const Region& support() const { return support_; }
  int smooth_order() const { return order_; }

 private:
  // Value and derivative of the transition in one coordinate.
  std::pair<double, double> edge(double t, double lo, double hi, bool rising) const;
  Region core_;
  Region support_;
  int order_;
};

/// Polynomial smoothstep with `order` continuous derivatives (kSmoothInfinity: exp(-1/t) blend).
double smoothstep(int order, double t);
double smoothstep_derivative(int order, double t);

/// Default cut-function order for a family of smoothness k.
int default_cut_order(int k);

CutFunction make_bump(const Region& core, const Region& support, int smooth_order);

struct SplittingData {
  FieldFamily family;
  std::size_t split_index;  // first split_index coordinates form B1
  CutFunction phi1;
  CutFunction phi2;

  /// Throws PreconditionError if the supports meet on a dense sample grid.
  void validate(int samples_per_axis = 401) const;
};

FieldFamily split_family(const SplittingData& data);
FieldFamily stabilize(const FieldFamily& family, const CutFunction& phi);
FieldFamily extend_trivially(const FieldFamily& family, std::size_t extra_dims);

enum class BasicKind { AH, SN, HC, SC, SL, PC };

std::string to_string(BasicKind k);
BasicKind basic_kind_from_string(const std::string& s);

FieldFamily model_two_parabolic_cycles();
FieldFamily model_synchronized_cycles();
FieldFamily model_basic(BasicKind kind);

// Reference systems used across tests and examples.
FieldFamily model_logistic_cycle();  // r' = r(1 - r), theta' = 1
FieldFamily model_linear_sink();     // x' = -x, y' = -y
FieldFamily model_linear_center();   // x' = -y, y' = x
FieldFamily model_linear_saddle();   // x' = x, y' = -y

/// Builtin lookup by name (see README for the list).
FieldFamily builtin_family(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace lbs

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Oracles (circle radii, cross lines, e^-2pi, eigenvalues) are written out here
// rather than taken from the library.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "lbs/diagram.hpp"

using namespace lbs;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// two-sided Hausdorff distance between a point set and the circle |p| = r
double to_circle(const std::vector<Vec2>& pts, double r) {
  double off = 0.0;
  for (const auto& p : pts) off = std::max(off, std::abs(norm(p) - r));
  std::vector<Vec2> c;
  for (int i = 0; i < 1440; ++i) c.push_back({r * std::cos(kTwoPi * i / 1440), r * std::sin(kTwoPi * i / 1440)});
  return std::max(off, directed_hausdorff(c, pts));
}

Outcome two_circles(const SupportSet& lbs, double h) {
  Outcome o;
  if (lbs.component_count != 2) {
    o.detail = std::to_string(lbs.component_count) + " components";
    return o;
  }
  std::vector<double> d1, d2;
  for (int c = 0; c < 2; ++c) {
    const auto pts = lbs.component_points(c);
    d1.push_back(to_circle(pts, 1.0));
    d2.push_back(to_circle(pts, 2.0));
  }
  const double best = std::min(std::max(d1[0], d2[1]), std::max(d1[1], d2[0]));
  o.pass = best <= 3.0 * h;
  o.detail = fmt("h=%g: 2 components, worst Hausdorff to r=1,2 circles %.4g (limit %.4g)", h, best, 3.0 * h);
  return o;
}

Outcome c1() {
  const FieldFamily f = model_two_parabolic_cycles();
  const Outcome a = two_circles(compute_lbs(f, 0.01).lbs, 0.01);
  const Outcome b = two_circles(compute_lbs(f, 0.005).lbs, 0.005);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

std::string report_line(const CheckReport& r) {
  std::string s = r.pass ? "pass" : (r.inconclusive ? "inconclusive" : "fail");
  for (const auto& n : r.notes) s += "; " + n;
  return s;
}

Outcome c2() {
  const FieldFamily f = model_two_parabolic_cycles();
  const CutFunction phi = make_bump(Region::annulus(0.7, 2.3), Region::annulus(0.5, 2.5), 3);
  const CheckReport r = check_stabilization_invariance(f, phi, 0.01);
  return {r.pass && r.metric <= 0.03, report_line(r)};
}

SplittingData split_data() {
  // phi_i on [a, b]: support [a, b], core trimmed by a quarter of the width at each end
  return SplittingData{model_two_parabolic_cycles(), 1,
                       make_bump(Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.4), 3),
                       make_bump(Region::annulus(1.8, 2.2), Region::annulus(1.6, 2.4), 3)};
}

Outcome c3() {
  const CheckReport r = check_split_inclusion(split_data(), 0.01);
  return {r.pass && r.metric <= 0.03, report_line(r)};
}

Outcome c4() {
  const SplittingData d = split_data();
  const GridSpec g = GridSpec::box(2, 0.05, 0.005);
  BifurcationDiagram bd;
  const CheckReport ps = verify_product_structure(d, g, {}, &bd);
  const CheckReport cross = compare_with_cross(bd, {0.0}, {0.0});
  // 20 cells away from every labeled cell (one-cell margin), fixed seed
  std::set<std::pair<long, long>> labeled;
  for (std::size_t c = 0; c < bd.cells.size(); ++c) {
    if (bd.labeled(c)) labeled.insert({long(bd.cells[c].index[0]), long(bd.cells[c].index[1])});
  }
  std::vector<std::size_t> off;
  for (std::size_t c = 0; c < bd.cells.size(); ++c) {
    const long i = long(bd.cells[c].index[0]), j = long(bd.cells[c].index[1]);
    bool near = bd.cells[c].failed;
    for (long di = -1; di <= 1; ++di) {
      for (long dj = -1; dj <= 1; ++dj) near = near || labeled.count({i + di, j + dj});
    }
    if (!near) off.push_back(c);
  }
  std::mt19937 rng(20240611);
  std::shuffle(off.begin(), off.end(), rng);
  off.resize(std::min<std::size_t>(off.size(), 20));
  const FieldFamily w = split_family(d);
  int stable = 0;
  std::string unstable;
  for (std::size_t c : off) {
    const ParamPoint e = bd.cell_center(c);
    if (check_structural_stability(w, e).stable) {
      ++stable;
    } else {
      unstable += fmt(" (%.4f, %.4f)", e[0], e[1]);
    }
  }
  Outcome o;
  o.pass = ps.pass && cross.pass && off.size() == 20 && stable == 20;
  o.detail = "product structure " + report_line(ps) + "; cross " + (cross.pass ? "pass" : "fail") + "; " +
             std::to_string(stable) + "/" + std::to_string(off.size()) + " off-diagram cells stable" + unstable;
  return o;
}

Outcome c5() {
  const GridSpec g = GridSpec::box(2, 0.05, 0.005);
  const Region u1 = Region::annulus(0.6, 1.4), u2 = Region::annulus(1.6, 2.4);
  const FieldFamily a = model_two_parabolic_cycles(), b = model_synchronized_cycles();
  const CheckReport ra = check_independence(a, u1, u2, g);
  const CheckReport rb = check_independence(b, u1, u2, g);
  const int na = compute_lbs(a, 0.01).lbs.component_count, nb = compute_lbs(b, 0.01).lbs.component_count;
  Outcome o;
  o.pass = ra.pass && !rb.pass && !rb.inconclusive && na == 2 && nb == 2;
  o.detail = std::string("two_parabolic ") + (ra.pass ? "PASS" : "FAIL") + " (" + std::to_string(na) +
             " components), synchronized " + (rb.pass ? "PASS" : "FAIL") + " (" + std::to_string(nb) + " components)";
  return o;
}

Outcome c6() {
  Outcome o{true, ""};
  int tested = 0;
  for (const auto& name : builtin_names()) {
    const FieldFamily f = builtin_family(name);
    const LbsResult r = compute_lbs(f, 0.01);
    if (r.lbs.empty()) continue;
    ++tested;
    const CheckReport p = check_prop7(r.lbs, r.portrait);
    o.pass = o.pass && p.pass;
    std::string kinds;
    for (const auto& n : p.notes) kinds += (kinds.empty() ? "" : ", ") + n;
    o.detail += (o.detail.empty() ? "" : " | ") + name + " " + (p.pass ? "pass" : "FAIL") + " [" + kinds + "]";
  }
  o.pass = o.pass && tested > 0;
  return o;
}

// x' = y, y' = mu (1 - x^2) y - x with mu = 0.2 + eps / 10; section on the positive x axis.
// Weak damping keeps dP around 1e-2..1, where a difference quotient still resolves it.
FieldFamily van_der_pol() {
  FamilySpec spec;
  spec.name = "van_der_pol";
  spec.base_dim = 1;
  spec.domains = {ChartDomain{"box", Region::rect(-8, 8, -8, 8), BoundaryBehavior::unspecified}};
  spec.eval = [](std::span<const double> e, const Vec2& p) {
    const double mu = 0.2 + 0.1 * e[0];
    return Vec2{p.y, mu * (1.0 - p.x * p.x) * p.y - p.x};
  };
  spec.jacobian = [](std::span<const double> e, const Vec2& p) {
    const double mu = 0.2 + 0.1 * e[0];
    return Mat2{0.0, 1.0, -2.0 * mu * p.x * p.y - 1.0, mu * (1.0 - p.x * p.x)};
  };
  spec.sections = {Section{{2.25, 0.0}, {1.0, 0.0}, 1.75, -1}};
  return FieldFamily(std::move(spec));
}

Outcome c7() {
  const FieldFamily v = van_der_pol();
  double worst = 0.0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> us(-1.5, 1.5), ue(-0.05, 0.05);
    const double s = us(rng);
    const ParamPoint e{ue(rng)};
    const double var = return_map(v, e, v.sections()[0], s, 1e-12).dP;
    const double fd = return_map_fd(v, e, v.sections()[0], s, 1e-12, 1e-4);
    worst = std::max(worst, std::abs(var - fd) / std::abs(fd));
  }
  const auto cycles = find_limit_cycles(model_logistic_cycle(), ParamPoint{0.0}, model_logistic_cycle().sections());
  double logistic_err = 1.0;
  if (cycles.size() == 1) logistic_err = std::abs(cycles[0].multiplier - std::exp(-kTwoPi)) / std::exp(-kTwoPi);
  const auto sn = classify_singular_point(model_basic(BasicKind::SN), ParamPoint{0.0}, {0.0, 0.0});
  const double sn_err = std::max(std::abs(sn.eigenvalues[0] - std::complex<double>(-1.0, 0.0)),
                                 std::abs(sn.eigenvalues[1] - std::complex<double>(0.0, 0.0)));
  Outcome o;
  o.pass = worst <= 1e-5 && logistic_err <= 1e-6 && sn_err <= 1e-8;
  o.detail = fmt("variational vs FD worst rel %.3g over 100 seeds; logistic multiplier rel err %.3g; SN eigenvalue err %.3g",
                 worst, logistic_err, sn_err) +
             (cycles.size() == 1 ? "" : "; logistic cycle count " + std::to_string(cycles.size()));
  return o;
}

Outcome c8() {
  const std::pair<BasicKind, DegeneracyClass> cases[] = {{BasicKind::AH, DegeneracyClass::AH},
                                                         {BasicKind::SN, DegeneracyClass::SN},
                                                         {BasicKind::SC, DegeneracyClass::SC},
                                                         {BasicKind::SL, DegeneracyClass::SL},
                                                         {BasicKind::PC, DegeneracyClass::PC}};
  Outcome o{true, ""};
  for (const auto& [kind, cls] : cases) {
    const GridSpec g = GridSpec::box(1, 0.05, 0.005);
    const auto bd = scan_diagram(model_basic(kind), g);
    bool ok = bd.curves.size() == 1 && bd.curves[0].cls == cls && std::abs(bd.curves[0].estimate[0]) <= g.step;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + to_string(kind) + ": " + std::to_string(bd.curves.size()) + " curve(s)";
    if (!bd.curves.empty()) o.detail += " " + to_string(bd.curves[0].cls) + fmt(" at %.3g", bd.curves[0].estimate[0]);
  }
  return o;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LBS_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c9() {
  const fs::path root = fs::temp_directory_path() / "lbs_acceptance";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"portrait --model two_parabolic_cycles", {"portrait.json", "skeleton.svg"}},
      {"lbs --model two_parabolic_cycles", {"lbs.json", "lbs.svg"}},
      {"diagram --model PC", {"diagram.json", "diagram.csv", "diagram.svg"}}};
  Outcome o{true, ""};
  std::size_t files = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const fs::path a = root / ("a" + std::to_string(k)), b = root / ("b" + std::to_string(k));
    if (run_cli(runs[k].first + " --out " + a.string()) != 0 || run_cli(runs[k].first + " --out " + b.string()) != 0) {
      o.pass = false;
      o.detail += "'" + runs[k].first + "' failed; ";
      continue;
    }
    for (const auto& f : runs[k].second) {
      const std::string x = slurp(a / f), y = slurp(b / f);
      ++files;
      if (x.empty() || x != y) {
        o.pass = false;
        o.detail += f + " differs; ";
      }
    }
  }
  o.detail += std::to_string(files) + " artifacts compared";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"LBS of two parabolic cycles", c1}, {"stabilization invariance", c2}, {"split inclusion", c3},
      {"product diagram", c4},             {"independence", c5},             {"witnesses on builtins", c6},
      {"numerics", c7},                    {"basic 1D scans", c8},           {"determinism", c9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%.1fs) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

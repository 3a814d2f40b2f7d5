#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "lbs/diagram.hpp"

namespace lbs {

using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;

struct CutSpec {
  Region core = Region::annulus(0.7, 2.3);
  Region support = Region::annulus(0.5, 2.5);
  int order = 0;  // 0: default_cut_order(family smoothness)
};

/// Everything a CLI run depends on. See docs/config.md for the schema.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  Json family = Json{{"builtin", "two_parabolic_cycles"}};
  std::string transform = "none";  // none | stabilize | split
  std::vector<double> epsilon;     // empty: zero of the family's base
  double tol = 1e-10;
  double h = 0.01;
  double h_eps = 0.005;
  double half_width = 0.05;
  double hyperbolicity_floor = 1e-6;
  double tangency_floor = 1e-7;
  int seeds_per_axis = 16;
  std::vector<Region> regions{Region::annulus(0.6, 1.4), Region::annulus(1.6, 2.4)};
  CutSpec phi;
  CutSpec phi1{Region::annulus(0.8, 1.2), Region::annulus(0.6, 1.4)};
  CutSpec phi2{Region::annulus(1.8, 2.2), Region::annulus(1.6, 2.4)};
  std::size_t split_index = 1;
  std::string check;
  std::string out = "out";
};

Json region_to_json(const Region& r);
Region region_from_json(const Json& j);

Json config_to_json(const RunConfig& c);
/// Strict: unknown keys, wrong types and version mismatches throw ConfigError.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);

/// Family described by a config source: {"builtin": name}, {"polynomial": {...}} or {"file": path}.
FieldFamily family_from_source(const Json& source);
/// Source family after the configured transform.
FieldFamily build_family(const RunConfig& c);
FieldFamily base_family(const RunConfig& c);
CutFunction make_cut(const CutSpec& s, const FieldFamily& family);
SplittingData splitting_data(const RunConfig& c);

ParamPoint resolved_epsilon(const RunConfig& c, const FieldFamily& family);
PortraitOptions portrait_options(const RunConfig& c);
DiagramOptions diagram_options(const RunConfig& c);
LbsOptions lbs_options(const RunConfig& c);

Json to_json(const PhasePortrait& pp);
Json to_json(const SupportSet& s);
Json to_json(const CheckReport& r);
Json to_json(const BifurcationDiagram& bd);

/// One row per label: eps_1, eps_2, class, location x, location y (cell centre for the parameters).
void write_diagram_csv(std::ostream& os, const BifurcationDiagram& bd, const Json& config);

std::string skeleton_svg(const PhasePortrait& pp, const FieldFamily& family, const Json& config);
/// LBS components drawn over the skeleton of the portrait at eps = 0.
std::string support_svg(const SupportSet& s, const PhasePortrait& pp, const FieldFamily& family, const Json& config);
std::string diagram_svg(const BifurcationDiagram& bd, const Json& config);

/// Writes text to path, creating parent directories.
void write_file(const std::string& path, const std::string& text);

}  // namespace lbs

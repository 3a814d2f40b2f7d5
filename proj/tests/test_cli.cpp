#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "lbs_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const std::string cmd = std::string(LBS_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// a 10 x 10 grid keeps the 2-parameter checks quick
const char* kCoarse = R"({"schema_version": 1, "numerics": {"h_eps": 0.01}})";

}  // namespace

TEST_CASE("portrait of two parabolic cycles") {
  const auto r = run("portrait --model two_parabolic_cycles --epsilon 0,0 --out " + out_dir("p"));
  CHECK(r.code == 0);
  const auto j = read_json(scratch() / "p" / "portrait.json");
  CHECK(j["portrait"]["singular_points"].size() == 1);
  CHECK(j["portrait"]["cycles"].size() == 2);
  CHECK(j["config"]["schema_version"] == 1);
  CHECK(j["config"]["epsilon"] == nlohmann::json::array({0.0, 0.0}));
  CHECK(fs::exists(scratch() / "p" / "skeleton.svg"));
}

TEST_CASE("malformed config exits 1") {
  CHECK(run("portrait --config " + write_config("bad.json", "{\"schema_version\": 1,") + " --out " + out_dir("b"))
            .code == 1);
  CHECK(run("portrait --config " + write_config("bad2.json", R"({"schema_version": 1, "colour": 3})")).code == 1);
  CHECK(run("portrait --epsilon 0,zero").code == 1);
  CHECK(run("portrait --model no_such_model").code == 1);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("coarse tolerance leaves the parabolic multiplicity unresolved") {
  const auto r = run("portrait --model PC --tol 1e-2 --out " + out_dir("pc"));
  CHECK(r.code == 2);
  CHECK(r.output.find("unresolved multiplicity") != std::string::npos);
}

TEST_CASE("lbs component counts") {
  const std::pair<const char*, const char*> cases[] = {
      {"two_parabolic_cycles", "components: 2"}, {"logistic_cycle", "components: 0"},
      {"synchronized_cycles", "components: 2"}};
  for (const auto& [model, expect] : cases) {
    const auto r = run(std::string("lbs --model ") + model + " --out " + out_dir(std::string("l_") + model));
    CHECK_MESSAGE(r.code == 0, model);
    CHECK_MESSAGE(r.output.find(expect) != std::string::npos, r.output);
  }
  const auto j = read_json(scratch() / "l_two_parabolic_cycles" / "lbs.json");
  for (const char* k : {"points", "provenance", "components", "h"}) CHECK(j["lbs"].contains(k));
  CHECK(j["config"]["family"]["builtin"] == "two_parabolic_cycles");
  CHECK(fs::exists(scratch() / "l_two_parabolic_cycles" / "lbs.svg"));
}

TEST_CASE("diagram artifacts") {
  const auto r = run("diagram --model SN --out " + out_dir("d"));
  CHECK(r.code == 0);
  for (const char* f : {"diagram.csv", "diagram.json", "diagram.svg"}) CHECK(fs::exists(scratch() / "d" / f));
  const std::string csv = slurp(scratch() / "d" / "diagram.csv");
  CHECK(csv.rfind("# config: {", 0) == 0);
  CHECK(csv.find("\neps_1,eps_2,class,") != std::string::npos);
  CHECK(csv.find(",SN,") != std::string::npos);
  // crude well-formedness: every opened text element is closed
  const std::string svg = slurp(scratch() / "d" / "diagram.svg");
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("<text") > 0);
  CHECK(count("<text") == count("</text>"));
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("verify exit codes") {
  const std::string coarse = write_config("coarse.json", kCoarse);
  CHECK(run("verify --check product-structure --config " + coarse + " --out " + out_dir("v1")).code == 0);
  const auto ind = run("verify --check independence --model synchronized_cycles --config " + coarse + " --out " +
                       out_dir("v2"));
  CHECK(ind.code == 3);
  CHECK(ind.output.find("components: 2") != std::string::npos);
  CHECK(run("verify --check prop7 --model two_parabolic_cycles --out " + out_dir("v3")).code == 0);
  const auto j = read_json(scratch() / "v3" / "verify_prop7.json");
  CHECK(j["report"]["result"] == "PASS");
  CHECK(run("verify --check no-such-check").code == 1);
  CHECK(run("verify").code == 1);
}

TEST_CASE("repeated runs are byte identical") {
  CHECK(run("lbs --model SC --out " + out_dir("r1")).code == 0);
  CHECK(run("lbs --model SC --out " + out_dir("r2")).code == 0);
  for (const char* f : {"lbs.json", "lbs.svg"}) {
    CHECK(slurp(scratch() / "r1" / f) == slurp(scratch() / "r2" / f));
  }
}

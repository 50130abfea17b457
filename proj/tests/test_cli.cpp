#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SCHERKLAB_CLI;
const std::string kData = SCHERKLAB_TEST_DATA;

fs::path scratch() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / ("scherklab_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " > " + (scratch() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_log() {
  std::ifstream in(scratch() / "last.log");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

// Rewrites the value column of a field file.
template <typename F>
void rewrite_field(const fs::path& in, const fs::path& out, F f) {
  std::ifstream is(in);
  std::ofstream os(out);
  std::string line;
  os.precision(17);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("node_id", 0) == 0) {
      os << line << "\n";
      continue;
    }
    std::stringstream ss(line);
    std::string id, x, y, u;
    std::getline(ss, id, ',');
    std::getline(ss, x, ',');
    std::getline(ss, y, ',');
    std::getline(ss, u, ',');
    os << id << "," << x << "," << y << "," << f(std::stoi(id), std::stod(u)) << "\n";
  }
}

const fs::path& calibrated_file() {
  static const fs::path p = [] {
    const fs::path dir = scratch() / "cal";
    REQUIRE(run("--out " + dir.string() + " calibrate " + kData + "/quad_family.json") == 0);
    return dir / "calibrated_domain.json";
  }();
  return p;
}

const fs::path& solved_dir() {
  static const fs::path p = [] {
    const fs::path dir = scratch() / "solve";
    REQUIRE(run("--out " + dir.string() + " solve " + calibrated_file().string() + " --cap-M 10") == 0);
    return dir;
  }();
  return p;
}

}  // namespace

TEST_CASE("check: exit codes") {
  CHECK(run("--out " + (scratch() / "c1").string() + " check " + calibrated_file().string()) == 0);
  const json r = read_json(scratch() / "c1" / "check_report.json");
  CHECK(r["verdict"] == true);
  CHECK(r["version"] == "0.1.0");
  CHECK(r["run_config"]["command"] == "check");

  CHECK(run("--out " + (scratch() / "c2").string() + " check " + kData + "/lopsided.json") == 1);
  CHECK(read_json(scratch() / "c2" / "check_report.json")["verdict"] == false);

  CHECK(run("--out " + (scratch() / "c3").string() + " check " + kData + "/malformed.json") == 2);
  CHECK(last_log().find("malformed JSON") != std::string::npos);
  CHECK(run("check " + kData + "/does_not_exist.json") == 2);
  CHECK(run("check") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("check " + calibrated_file().string() + " --tol -1") == 2);
}

TEST_CASE("threads come from the environment and are recorded") {
  const fs::path dir = scratch() / "threads";
  CHECK(run("--out " + dir.string() + " --seed 7 check " + calibrated_file().string(), "SCHERKLAB_THREADS=3") == 0);
  const json r = read_json(dir / "check_report.json");
  CHECK(r["run_config"]["threads"] == 3);
  CHECK(r["run_config"]["seed"] == 7);
  CHECK(run("check " + calibrated_file().string(), "SCHERKLAB_THREADS=0") == 2);
  CHECK(run("check " + calibrated_file().string(), "SCHERKLAB_THREADS=two") == 2);
}

TEST_CASE("calibrate: output is a domain and recalibrating it is idempotent") {
  const json first = read_json(calibrated_file());
  CHECK(first["param"].get<double>() == doctest::Approx(2.208207238524).epsilon(1e-10));
  CHECK(first["vertices"].size() == 4);
  CHECK(first.contains("family"));

  const fs::path dir = scratch() / "cal2";
  REQUIRE(run("--out " + dir.string() + " calibrate " + calibrated_file().string()) == 0);
  const json second = read_json(dir / "calibrated_domain.json");
  CHECK(std::abs(second["param"].get<double>() - first["param"].get<double>()) < 1e-8);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(second["vertices"][i].get<double>() - first["vertices"][i].get<double>()) < 1e-8);
  }

  CHECK(run("--out " + (scratch() / "cal3").string() + " calibrate " + kData +
            "/quad_family.json --param-range 0.8,1.5") == 1);
  CHECK(run("calibrate " + kData + "/quad_family.json --param-range 2,1") == 2);
  CHECK(run("calibrate " + kData + "/malformed.json") == 2);
}

TEST_CASE("solve: artifacts with provenance headers") {
  const fs::path dir = solved_dir();
  for (const char* f : {"field.csv", "mesh.json", "nodes.csv", "solve_report.json", "flux_report.json"}) {
    CHECK(fs::exists(dir / f));
  }
  std::ifstream in(dir / "field.csv");
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1.rfind("# run_config: {", 0) == 0);
  CHECK(l2 == "# version: 0.1.0");
  CHECK(l3 == "node_id,x,y,u");
  const json r = read_json(dir / "solve_report.json");
  CHECK(r["M_reached"] == 10.0);
  CHECK(std::abs(r["stokes_residual"].get<double>()) < 1e-3);
  CHECK(r["run_config"]["args"]["cap_M"] == 10.0);
  for (const auto& e : fs::directory_iterator(dir)) {
    CHECK(e.path().string().find(".tmp.") == std::string::npos);
  }
  CHECK(run("solve " + calibrated_file().string() + " --target-h 0") == 2);
}

TEST_CASE("barrier: disk and domain forms") {
  const fs::path dir = scratch() / "bar";
  CHECK(run("--out " + dir.string() + " barrier --disk 0,0,0.3,0.6 --t-max 0.4 --steps 4") == 0);
  const json r = read_json(dir / "barrier_report.json");
  CHECK(r["eps_reached"].get<double>() == doctest::Approx(0.4));
  CHECK(fs::exists(dir / "barrier_fields.csv"));
  CHECK(run("--out " + (scratch() / "bar2").string() + " barrier " + calibrated_file().string() +
            " --t-max 0.2 --steps 2 --cap-M 10") == 0);
  CHECK(run("barrier") == 2);
  CHECK(run("barrier " + calibrated_file().string() + " --disk 0,0,0.3,0.6") == 2);
}

TEST_CASE("halfspace: translate, contact and rejected surfaces") {
  const fs::path field = solved_dir() / "field.csv";
  const std::string base = " halfspace " + calibrated_file().string() + " --cap-M 10 --surface ";

  const fs::path up = scratch() / "S_up.csv";
  rewrite_field(field, up, [](int, double u) { return u + 0.7; });
  const fs::path d3 = scratch() / "hs3";
  CHECK(run("--out " + d3.string() + base + up.string() + " --levels 2") == 0);
  const json r3 = read_json(d3 / "halfspace.json");
  CHECK(r3["case"] == 3);
  CHECK(std::abs(r3["alpha"].get<double>() - 0.7) < 1e-10);
  CHECK(r3["verdict"] == "translate detected");
  CHECK(r3["table"]["rows"].size() == 2);
  CHECK(r3["eps"]["eps_prime"].get<double>() <= 0.35);

  const fs::path same = scratch() / "S_eq.csv";
  rewrite_field(field, same, [](int, double u) { return u; });
  const fs::path d1 = scratch() / "hs1";
  CHECK(run("--out " + d1.string() + base + same.string() + " --levels 0") == 0);
  const json r1 = read_json(d1 / "halfspace.json");
  CHECK(r1["case"] == 1);
  CHECK(r1["verdict"] == "translate detected");

  const fs::path bumped = scratch() / "S_bad.csv";
  rewrite_field(field, bumped, [](int id, double u) { return u + 0.7 + (id == 200 ? 0.05 : 0.0); });
  CHECK(run(base + bumped.string()) == 2);
  CHECK(last_log().find("not CMC within tolerance") != std::string::npos);

  const fs::path below = scratch() / "S_below.csv";
  rewrite_field(field, below, [](int, double u) { return u - 0.5; });
  CHECK(run(base + below.string()) == 2);

  // A surface from a different mesh does not line up.
  CHECK(run(base + (solved_dir() / "nodes.csv").string()) == 2);
  CHECK(run(base + up.string() + " --target-h 0.08") == 2);
}

// Batch front end over the C interface. Exit codes: 0 pass, 1 negative
// verdict or failed run, 2 input error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "scherklab/scherklab.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void input_error(const std::string& msg) { throw Failure{kInputError, msg}; }
[[noreturn]] void run_error(const std::string& msg) { throw Failure{kNegative, msg}; }

void check(sl_status s, const char* what) {
  if (s == SL_OK) return;
  const std::string msg = std::string(what) + ": " + sl_status_name(s) + ": " + sl_last_error();
  if (s == SL_ERR_PARSE || s == SL_ERR_INVALID_ARGUMENT || s == SL_ERR_GEOMETRY) input_error(msg);
  run_error(msg);
}

struct StrDel {
  void operator()(char* s) const { sl_string_free(s); }
};
struct DomainDel {
  void operator()(sl_domain* d) const { sl_domain_free(d); }
};
struct MeshDel {
  void operator()(sl_mesh* m) const { sl_mesh_free(m); }
};
struct FieldDel {
  void operator()(sl_field* f) const { sl_field_free(f); }
};
using Str = std::unique_ptr<char, StrDel>;
using Domain = std::unique_ptr<sl_domain, DomainDel>;
using Mesh = std::unique_ptr<sl_mesh, MeshDel>;
using Field = std::unique_ptr<sl_field, FieldDel>;

std::string take(char* s) { return std::string(Str(s).get()); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Context {
  std::string out_dir = ".";
  int seed = 0;
  int threads = 1;
  std::string command;
  json args = json::object();

  json run_config() const {
    return {{"command", command}, {"args", args}, {"seed", seed}, {"threads", threads}, {"output_dir", out_dir}};
  }
};

void write_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) run_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) run_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_json(const Context& ctx, const std::string& name, json j) {
  j["run_config"] = ctx.run_config();
  j["version"] = sl_version();
  write_atomic(fs::path(ctx.out_dir) / name, j.dump(2) + "\n");
}

void write_csv(const Context& ctx, const std::string& name, const std::string& body) {
  std::string text = "# run_config: " + ctx.run_config().dump() + "\n# version: " + sl_version() + "\n" + body;
  write_atomic(fs::path(ctx.out_dir) / name, text);
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      input_error(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (v.size() != n) input_error(std::string(flag) + " expects " + std::to_string(n) + " comma separated numbers");
  return v;
}

Domain load_domain(const std::string& path) {
  const std::string text = read_file(path);
  sl_domain* d = nullptr;
  check(sl_domain_parse(text.c_str(), &d), "domain");
  return Domain(d);
}

std::vector<double> values_of(const sl_field* f) {
  std::vector<double> v(sl_field_size(f));
  check(sl_field_values(f, v.data(), v.size()), "field");
  return v;
}

void check_h(double h) {
  if (!(h > 0.0 && h < 1.0)) input_error("--target-h must lie in (0, 1)");
}

// ---- check ----

struct CheckArgs {
  std::string domain;
  double size = 0.0;
  double tol = 1e-8;
  double margin = 1e-6;
};

int cmd_check(Context& ctx, const CheckArgs& a) {
  ctx.args = {{"domain_file", a.domain}, {"horodisk_size", a.size}, {"tol", a.tol}, {"margin", a.margin}};
  if (!(a.tol > 0.0) || !(a.margin > 0.0)) input_error("--tol and --margin must be positive");
  const Domain d = load_domain(a.domain);
  if (!(sl_domain_H(d.get()) > 0.0 && sl_domain_H(d.get()) < 0.5)) input_error("H must lie in (0, 1/2)");
  int verdict = 0;
  char *rj = nullptr, *rc = nullptr;
  check(sl_domain_check(d.get(), a.size, a.tol, a.margin, &verdict, &rj, &rc), "check");
  json report = json::parse(take(rj));
  const std::string csv = take(rc);
  write_json(ctx, "check_report.json", {{"verdict", verdict == 1}, {"report", report}});
  write_csv(ctx, "check_report.csv", csv);
  std::cout << "verdict: " << (verdict ? "solvable" : "not solvable")
            << "  equality_residual: " << report["equality_residual"].get<double>() << "\n";
  return verdict ? kPass : kNegative;
}

// ---- calibrate ----

struct CalibrateArgs {
  std::string family;
  std::string range;
};

int cmd_calibrate(Context& ctx, const CalibrateArgs& a) {
  ctx.args = {{"family_file", a.family}, {"param_range", a.range}};
  json input;
  try {
    input = json::parse(read_file(a.family));
  } catch (const json::parse_error& e) {
    input_error(std::string("parse error: malformed JSON: ") + e.what());
  }
  // A calibrated domain file carries its family, so it can be recalibrated.
  json family = input.contains("family") ? input["family"] : input;
  double lo = 0.0, hi = 0.0;
  if (!a.range.empty()) {
    const auto r = parse_list(a.range, 2, "--param-range");
    if (!(r[0] < r[1])) input_error("--param-range needs lo < hi");
    lo = r[0];
    hi = r[1];
    family["param_range"] = {lo, hi};
  }
  int found = 0;
  double param = 0.0;
  sl_domain* out = nullptr;
  char* rj = nullptr;
  check(sl_calibrate(family.dump().c_str(), lo, hi, &found, &param, &out, &rj), "calibrate");
  const Domain d(out);
  const json report = json::parse(take(rj));
  if (!found) {
    write_json(ctx, "calibration.json", {{"calibration", report}});
    std::cout << "no calibrated parameter: " << report["message"].get<std::string>() << "\n";
    return kNegative;
  }
  char* dj = nullptr;
  check(sl_domain_json(d.get(), &dj), "domain");
  json dom = json::parse(take(dj));
  dom["param"] = param;
  dom["family"] = family;
  dom["calibration"] = report;
  write_json(ctx, "calibrated_domain.json", dom);
  std::cout.precision(17);
  std::cout << "param: " << param << "  equality_residual: " << report["report"]["equality_residual"].get<double>()
            << "\n";
  return kPass;
}

// ---- solve ----

struct SolveArgs {
  std::string domain;
  double cap_M = 20.0;
  int level = 1;
  double target_h = 0.1;
  double c_cap = 0.0;
  std::string by = "0,0,0.3";
};

std::optional<std::vector<double>> parse_by(const std::string& s) {
  if (s == "none") return std::nullopt;
  auto v = parse_list(s, 3, "--by");
  if (!(v[2] > 0.0)) input_error("--by radius must be positive");
  return v;
}

struct Solved {
  Domain domain;
  Mesh mesh;
  Field u;
  json report;
  double M_reached = 0.0;
};

Solved solve_capped(const SolveArgs& a, const sl_solver_config& cfg) {
  if (a.level < 1) input_error("--level-n must be at least 1");
  if (!(a.cap_M > 0.0)) input_error("--cap-M must be positive");
  check_h(a.target_h);
  Solved s;
  s.domain = load_domain(a.domain);
  const auto by = parse_by(a.by);
  sl_mesh* m = nullptr;
  check(sl_mesh_truncated(s.domain.get(), a.level, a.target_h, by ? by->data() : nullptr, &m), "mesh");
  s.mesh.reset(m);
  sl_field* f = nullptr;
  char* rj = nullptr;
  check(sl_scherk(s.domain.get(), s.mesh.get(), &cfg, &f, &s.M_reached, &rj), "solve");
  s.u.reset(f);
  s.report = json::parse(take(rj));
  return s;
}

sl_solver_config config_for(double cap_M, double c_cap) {
  sl_solver_config cfg;
  sl_solver_config_default(&cfg);
  cfg.cap_M = cap_M;
  cfg.c_cap = c_cap;
  return cfg;
}

int cmd_solve(Context& ctx, const SolveArgs& a) {
  ctx.args = {{"domain_file", a.domain}, {"cap_M", a.cap_M},   {"level_n", a.level},
              {"target_h", a.target_h},  {"c_cap", a.c_cap},   {"by", a.by}};
  const Solved s = solve_capped(a, config_for(a.cap_M, a.c_cap));
  const double H = sl_domain_H(s.domain.get());
  char *mj = nullptr, *nc = nullptr, *fc = nullptr, *xj = nullptr, *xc = nullptr;
  check(sl_mesh_json(s.mesh.get(), &mj), "mesh");
  check(sl_mesh_nodes_csv(s.mesh.get(), &nc), "mesh");
  check(sl_field_csv(s.u.get(), &fc), "field");
  check(sl_flux_report(s.u.get(), H, &xj, &xc), "flux");
  double stokes = 0.0, stokes_el = 0.0;
  check(sl_stokes_residual(s.u.get(), H, &stokes, &stokes_el), "flux");
  write_json(ctx, "mesh.json", json::parse(take(mj)));
  write_csv(ctx, "nodes.csv", take(nc));
  write_csv(ctx, "field.csv", take(fc));
  write_json(ctx, "flux_report.json", {{"reports", json::parse(take(xj))}});
  write_csv(ctx, "flux_report.csv", take(xc));
  json rep = s.report;
  rep["nodes"] = sl_mesh_node_count(s.mesh.get());
  rep["triangles"] = sl_mesh_triangle_count(s.mesh.get());
  rep["stokes_residual"] = stokes;
  rep["stokes_element"] = stokes_el;
  write_json(ctx, "solve_report.json", rep);
  const bool reached = rep["reached_cap"].get<bool>();
  std::cout << "nodes: " << rep["nodes"] << "  M_reached: " << s.M_reached << "  stokes_residual: " << stokes << "\n";
  return reached ? kPass : kNegative;
}

// ---- barrier ----

struct BarrierArgs {
  std::string domain;
  std::string disk;
  double t_max = 0.5;
  int steps = 10;
  double H = 0.25;
  double target_h = 0.08;
  double cap_M = 20.0;
  std::string annulus = "0,0,0.3,0.6";
};

// Discrete solution on the annulus with the boundary values of f.
Field resolve_on(const sl_mesh* ann, const sl_field* f, double H, const sl_solver_config& cfg) {
  sl_field* start = nullptr;
  check(sl_field_interpolate(f, ann, &start), "interpolate");
  const Field s(start);
  sl_field* out = nullptr;
  int converged = 0;
  check(sl_solve_boundary(s.get(), H, &cfg, &out, &converged, nullptr), "annulus solve");
  if (!converged) run_error("Newton failed on the annulus");
  return Field(out);
}

int cmd_barrier(Context& ctx, const BarrierArgs& a) {
  ctx.args = {{"domain_file", a.domain}, {"disk", a.disk},         {"t_max", a.t_max},  {"steps", a.steps},
              {"H", a.H},                {"target_h", a.target_h}, {"cap_M", a.cap_M}, {"annulus", a.annulus}};
  if (a.domain.empty() == a.disk.empty()) input_error("give either a domain file or --disk cx,cy,r_in,r_out");
  if (!(a.t_max > 0.0) || a.steps < 1) input_error("need --t-max > 0 and --steps >= 1");
  check_h(a.target_h);
  sl_solver_config cfg = config_for(a.cap_M, 0.0);
  cfg.t_max = a.t_max;
  cfg.steps = a.steps;
  double H = a.H;
  Mesh ann;
  Field u;
  if (!a.disk.empty()) {
    if (!(H > 0.0 && H < 0.5)) input_error("--H must lie in (0, 1/2)");
    const auto v = parse_list(a.disk, 4, "--disk");
    sl_mesh* m = nullptr;
    check(sl_mesh_annulus(v[0], v[1], v[2], v[3], a.target_h, &m), "annulus");
    ann.reset(m);
    // Radial solution about the center as the base field.
    const std::size_t n = sl_mesh_node_count(ann.get());
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
      double x = 0.0, y = 0.0;
      check(sl_mesh_node(ann.get(), i, &x, &y), "annulus");
      const double num = std::hypot(x - v[0], y - v[1]);
      const double den = std::hypot(1.0 - (v[0] * x + v[1] * y), v[0] * y - v[1] * x);
      vals[i] = sl_radial_value(H, 2.0 * std::atanh(num / den));
    }
    sl_field* f = nullptr;
    check(sl_field_create(ann.get(), vals.data(), n, &f), "field");
    const Field data(f);
    sl_field* out = nullptr;
    int converged = 0;
    check(sl_solve_boundary(data.get(), H, &cfg, &out, &converged, nullptr), "annulus solve");
    if (!converged) run_error("Newton failed on the annulus");
    u.reset(out);
  } else {
    // Capped solution of the domain, restricted to an annulus inside it.
    SolveArgs sa;
    sa.domain = a.domain;
    sa.cap_M = a.cap_M;
    sa.target_h = a.target_h;
    sa.by = "none";
    const Solved s = solve_capped(sa, cfg);
    H = sl_domain_H(s.domain.get());
    const auto v = parse_list(a.annulus, 4, "--annulus");
    sl_mesh* m = nullptr;
    check(sl_mesh_annulus(v[0], v[1], v[2], v[3], a.target_h, &m), "annulus");
    ann.reset(m);
    u = resolve_on(ann.get(), s.u.get(), H, cfg);
  }
  double eps = 0.0;
  char *rj = nullptr, *fc = nullptr;
  check(sl_barrier(u.get(), H, &cfg, &eps, &rj, &fc), "barrier");
  json rep = json::parse(take(rj));
  rep["H"] = H;
  write_json(ctx, "barrier_report.json", rep);
  write_csv(ctx, "barrier_fields.csv", take(fc));
  std::cout << "eps_reached: " << eps << "\n";
  return eps > 0.0 ? kPass : kNegative;
}

// ---- halfspace ----

struct HalfspaceArgs {
  SolveArgs solve;
  std::string surface;
  std::string eps_prime = "auto";
  int levels = 3;
  double probe_width = 0.3;
  double tol = 1e-8;
  double cmc_tol = 1e-6;
};

std::vector<double> read_surface(const std::string& path, const sl_mesh* m) {
  std::istringstream in(read_file(path));
  std::string line;
  const std::size_t n = sl_mesh_node_count(m);
  std::vector<double> vals(n, std::nan(""));
  std::vector<char> seen(n, 0);
  bool header = false;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("node_id", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) input_error("surface row " + std::to_string(rows + 1) + " needs node_id,x,y,u");
    double x = 0.0, y = 0.0, v = 0.0;
    long id = -1;
    try {
      id = std::stol(cells[0]);
      x = std::stod(cells[1]);
      y = std::stod(cells[2]);
      v = std::stod(cells[3]);
    } catch (const std::exception&) {
      input_error("surface row " + std::to_string(rows + 1) + " is not numeric");
    }
    if (id < 0 || static_cast<std::size_t>(id) >= n) input_error("surface node id " + cells[0] + " is not on the mesh");
    double mx = 0.0, my = 0.0;
    check(sl_mesh_node(m, id, &mx, &my), "mesh");
    if (std::hypot(mx - x, my - y) > 1e-9) {
      input_error("surface node " + cells[0] + " does not match the mesh; rerun solve with the same flags");
    }
    if (seen[id]) input_error("surface node " + cells[0] + " appears twice, so S is not a graph");
    if (!std::isfinite(v)) input_error("surface value at node " + cells[0] + " is not finite, so S is not a graph");
    seen[id] = 1;
    vals[id] = v;
    ++rows;
  }
  if (rows != n) input_error("surface has " + std::to_string(rows) + " nodes, the mesh has " + std::to_string(n));
  return vals;
}

int cmd_halfspace(Context& ctx, const HalfspaceArgs& a) {
  ctx.args = {{"domain_file", a.solve.domain}, {"surface", a.surface},      {"eps_prime", a.eps_prime},
              {"levels", a.levels},            {"cap_M", a.solve.cap_M},    {"level_n", a.solve.level},
              {"target_h", a.solve.target_h},  {"c_cap", a.solve.c_cap},    {"by", a.solve.by},
              {"probe_width", a.probe_width},  {"tol", a.tol},              {"cmc_tol", a.cmc_tol}};
  if (a.levels < 0) input_error("--levels must be non-negative");
  if (!(a.probe_width > 0.0) || !(a.tol > 0.0) || !(a.cmc_tol > 0.0)) input_error("widths and tolerances must be positive");
  const auto by = parse_by(a.solve.by);
  if (!by) input_error("halfspace needs a probe disk --by cx,cy,r");
  std::optional<double> eps_fixed;
  if (a.eps_prime != "auto") {
    eps_fixed = parse_list(a.eps_prime, 1, "--eps-prime")[0];
    if (!(*eps_fixed > 0.0)) input_error("--eps-prime must be positive or auto");
  }
  const sl_solver_config cfg = config_for(a.solve.cap_M, a.solve.c_cap);
  const Solved s = solve_capped(a.solve, cfg);
  const double H = sl_domain_H(s.domain.get());
  const std::vector<double> S = read_surface(a.surface, s.mesh.get());
  const std::vector<double> u = values_of(s.u.get());
  const std::size_t n = u.size();

  sl_field* sf = nullptr;
  check(sl_field_create(s.mesh.get(), S.data(), n, &sf), "surface");
  const Field Sf(sf);
  double res_S = 0.0, res_u = 0.0;
  check(sl_field_residual(Sf.get(), H, &res_S), "surface");
  check(sl_field_residual(s.u.get(), H, &res_u), "solve");
  if (res_S > a.cmc_tol) {
    std::ostringstream os;
    os << "surface is not CMC within tolerance (residual " << res_S << " > " << a.cmc_tol << ")";
    input_error(os.str());
  }

  double alpha = INFINITY;
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (S[i] - u[i] < alpha) {
      alpha = S[i] - u[i];
      argmin = i;
    }
  }
  if (alpha < -a.tol) {
    std::ostringstream os;
    os << "surface lies below u (inf gap " << alpha << ")";
    input_error(os.str());
  }
  bool interior_contact = false;
  bool boundary_contact = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (S[i] - u[i] <= a.tol) (sl_mesh_is_boundary(s.mesh.get(), i) ? boundary_contact : interior_contact) = true;
  }
  int which = 3;
  if (interior_contact) {
    which = 1;
  } else if (boundary_contact) {
    which = 2;
  }
  const double shift = which == 3 ? alpha : 0.0;

  // sup |S - u - shift| on the probe annulus around B_y and over the mesh.
  const std::complex<double> y((*by)[0], (*by)[1]);
  double probe_gap = 0.0, global_gap = 0.0;
  std::size_t probe_nodes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0, yy = 0.0;
    check(sl_mesh_node(s.mesh.get(), i, &x, &yy), "mesh");
    const std::complex<double> z(x, yy);
    const double rho = 2.0 * std::atanh(std::abs(z - y) / std::abs(1.0 - std::conj(y) * z));
    const double g = std::abs(S[i] - u[i] - shift);
    global_gap = std::max(global_gap, g);
    if (rho <= (*by)[2] + a.probe_width) {
      probe_gap = std::max(probe_gap, g);
      ++probe_nodes;
    }
  }
  const bool translate = probe_gap < a.tol;
  const std::string verdict = translate ? "translate detected" : "no translate detected";

  // eps' and the convergence table.
  json eps_info;
  double eps_prime = 0.0;
  if (eps_fixed) {
    eps_prime = *eps_fixed;
    eps_info = {{"mode", "value"}};
  } else {
    sl_mesh* am = nullptr;
    check(sl_mesh_annulus((*by)[0], (*by)[1], (*by)[2], (*by)[2] + a.probe_width, 0.08, &am), "annulus");
    const Mesh ann(am);
    const Field ua = resolve_on(ann.get(), s.u.get(), H, cfg);
    sl_solver_config bc = cfg;
    bc.t_max = 0.5;
    bc.steps = 5;
    double eps_reached = 0.0;
    check(sl_barrier(ua.get(), H, &bc, &eps_reached, nullptr, nullptr), "barrier");
    eps_prime = alpha > a.tol ? std::min(eps_reached / 2.0, alpha / 2.0) : eps_reached / 2.0;
    eps_info = {{"mode", "auto"}, {"eps_reached", eps_reached}, {"rule", "min(eps_reached/2, inf_gap/2)"}};
    if (!(eps_prime > 0.0)) run_error("barrier continuation gave eps_reached = 0");
  }
  eps_info["eps_prime"] = eps_prime;

  json table = nullptr;
  std::string table_csv = "n,sup_gap,dBy_diff_flux,sum_C_length\n";
  if (a.levels > 0) {
    char *tc = nullptr, *sj = nullptr;
    check(sl_uniqueness(s.domain.get(), a.levels, by->data(), a.probe_width, eps_prime, a.solve.target_h, &cfg, &tc,
                        &sj, nullptr),
          "uniqueness");
    table_csv = take(tc);
    table = json::parse(take(sj));
  }

  const char* case_text[] = {"", "contact: inf of S - u is attained at an interior point",
                             "inf of S - u is 0 and attained only on the truncation boundary",
                             "inf of S - u is a positive alpha; S - alpha touches u"};
  json out = {{"case", which},
              {"case_description", case_text[which]},
              {"alpha", alpha},
              {"alpha_node", argmin},
              {"shift", shift},
              {"probe_sup_gap", probe_gap},
              {"probe_nodes", probe_nodes},
              {"global_sup_gap", global_gap},
              {"surface_residual", res_S},
              {"u_residual", res_u},
              {"M_reached", s.M_reached},
              {"eps", eps_info},
              {"table", table},
              {"verdict", verdict}};
  write_json(ctx, "halfspace.json", out);
  write_csv(ctx, "convergence.csv", table_csv);
  std::cout.precision(12);
  std::cout << "case (" << which << "): " << case_text[which] << "\nalpha: " << alpha << "\nverdict: " << verdict
            << "\n";
  return translate ? kPass : kNegative;
}

int threads_from_env() {
  const char* env = std::getenv("SCHERKLAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) input_error(std::string("SCHERKLAB_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scherklab: Scherk type domains, capped CMC graphs and flux experiments"};
  app.require_subcommand(1);
  Context ctx;
  app.add_option("--out", ctx.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", ctx.seed, "Seed recorded in every output")->capture_default_str();
  app.set_version_flag("--version", std::string(sl_version()));

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check", "Solvability conditions for a domain file");
  check_cmd->add_option("domain_file", ca.domain)->required();
  check_cmd->add_option("--horodisk-size", ca.size, "Horodisk size (default: from the file)");
  check_cmd->add_option("--tol", ca.tol)->capture_default_str();
  check_cmd->add_option("--margin", ca.margin)->capture_default_str();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate a one-parameter domain family");
  cal_cmd->add_option("family_file", cal.family)->required();
  cal_cmd->add_option("--param-range", cal.range, "lo,hi");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Capped Dirichlet problem on a truncated domain");
  auto add_solve_flags = [](CLI::App* c, SolveArgs& s) {
    c->add_option("domain_file", s.domain)->required();
    c->add_option("--cap-M", s.cap_M)->capture_default_str();
    c->add_option("--level-n", s.level)->capture_default_str();
    c->add_option("--target-h", s.target_h)->capture_default_str();
    c->add_option("--c-cap", s.c_cap, "Bound on horocycle data (0: linear between caps)")->capture_default_str();
    c->add_option("--by", s.by, "Embedded geodesic circle cx,cy,r or none")->capture_default_str();
  };
  add_solve_flags(solve_cmd, sa);

  BarrierArgs ba;
  auto* bar_cmd = app.add_subcommand("barrier", "Annulus barrier continuation");
  bar_cmd->add_option("domain_file", ba.domain);
  bar_cmd->add_option("--disk", ba.disk, "cx,cy,r_in,r_out with a radial base solution");
  bar_cmd->add_option("--t-max", ba.t_max)->capture_default_str();
  bar_cmd->add_option("--steps", ba.steps)->capture_default_str();
  bar_cmd->add_option("--H", ba.H, "Mean curvature with --disk")->capture_default_str();
  bar_cmd->add_option("--target-h", ba.target_h)->capture_default_str();
  bar_cmd->add_option("--cap-M", ba.cap_M)->capture_default_str();
  bar_cmd->add_option("--annulus", ba.annulus, "cx,cy,r_in,r_out inside the domain")->capture_default_str();

  HalfspaceArgs ha;
  auto* hs_cmd = app.add_subcommand("halfspace", "Case analysis of a CMC graph S lying above u");
  add_solve_flags(hs_cmd, ha.solve);
  hs_cmd->add_option("--surface", ha.surface, "Field file node_id,x,y,u on the solve mesh")->required();
  hs_cmd->add_option("--eps-prime", ha.eps_prime, "auto or a value")->capture_default_str();
  hs_cmd->add_option("--levels", ha.levels)->capture_default_str();
  hs_cmd->add_option("--probe-width", ha.probe_width)->capture_default_str();
  hs_cmd->add_option("--tol", ha.tol)->capture_default_str();
  hs_cmd->add_option("--cmc-tol", ha.cmc_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    ctx.threads = threads_from_env();
    check(sl_set_threads(ctx.threads), "threads");
    if (check_cmd->parsed()) {
      ctx.command = "check";
      return cmd_check(ctx, ca);
    }
    if (cal_cmd->parsed()) {
      ctx.command = "calibrate";
      return cmd_calibrate(ctx, cal);
    }
    if (solve_cmd->parsed()) {
      ctx.command = "solve";
      return cmd_solve(ctx, sa);
    }
    if (bar_cmd->parsed()) {
      ctx.command = "barrier";
      return cmd_barrier(ctx, ba);
    }
    ctx.command = "halfspace";
    return cmd_halfspace(ctx, ha);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNegative;
  }
}

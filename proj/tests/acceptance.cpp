// One PASS/FAIL line per acceptance criterion. Exit status 0 when all pass.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "scherklab/domain.hpp"
#include "scherklab/flux.hpp"
#include "scherklab/hypgeom.hpp"
#include "scherklab/mesh.hpp"
#include "scherklab/solver.hpp"

using namespace scherklab;
namespace fs = std::filesystem;
using hyp::kPi;
using hyp::kTwoPi;
using nlohmann::json;
using solver::MeshPtr;
using solver::ScalarField;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::mt19937_64 g_rng(20261016);

MeshPtr disk_mesh(Complex c, double r, double h) {
  mesh::RefinementSpec s;
  s.target_h = h;
  return std::make_shared<const mesh::TriMesh>(mesh::mesh_disk(c, r, s));
}

MeshPtr annulus_mesh(Complex c, double r_in, double r_out, double h) {
  mesh::RefinementSpec s;
  s.target_h = h;
  return std::make_shared<const mesh::TriMesh>(mesh::mesh_annulus(c, r_in, r_out, s));
}

solver::SolverConfig tight() {
  solver::SolverConfig c;
  c.newton_tol = 1e-12;
  return c;
}

// u(rho) from the first integral, independent of the library's radial profile.
double radial_oracle(double H, double rho) {
  const double s = std::tanh(0.5 * rho);
  const double w = std::sqrt(1.0 - 4 * H * H * s * s);
  const double b = std::sqrt(1.0 - 4 * H * H);
  return 2 * H / b * (std::log((1 - b) / (1 + b)) - std::log((w - b) / (w + b)));
}

std::function<double(Complex)> random_smooth(double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::array<double, 7> a{};
  for (double& x : a) x = dist(g_rng);
  return [a](Complex z) {
    Complex p = 1.0;
    double v = a[0];
    for (int k = 1; k <= 3; ++k) {
      p *= z;
      v += a[2 * k - 1] * p.real() + a[2 * k] * p.imag();
    }
    return v;
  };
}

double sup_diff(const ScalarField& f, const ScalarField& g) {
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - g[i]));
  return d;
}

std::vector<hyp::Arc> truncated_polygon(const std::vector<double>& angles, const std::vector<double>& kappas,
                                        double size) {
  const std::size_t n = angles.size();
  std::vector<hyp::Arc> edges;
  std::vector<hyp::Horodisk> disks;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back(hyp::arc_between(hyp::IdealPoint(angles[i]), hyp::IdealPoint(angles[(i + 1) % n]), kappas[i]));
    disks.emplace_back(hyp::IdealPoint(angles[i]), size);
  }
  std::vector<hyp::Arc> chain;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const hyp::Truncation t = hyp::truncate(edges[i], disks[i], disks[j]);
    chain.push_back(t.arc);
    chain.push_back(hyp::horocycle_arc(disks[j], t.arc.end, hyp::exit_point(edges[j], disks[j], true)));
  }
  return chain;
}

domain::DomainFamily quad_family() {
  domain::DomainFamily f;
  f.H = 0.2;
  f.base_vertices = {0.0, 0.0, kPi, kPi};
  f.param_weights = {0.0, 1.0, 0.0, 1.0};
  f.labels = {hyp::ArcLabel::A, hyp::ArcLabel::B, hyp::ArcLabel::A, hyp::ArcLabel::B};
  f.horodisk_size = 0.2;
  f.param_lo = 0.5;
  f.param_hi = 3.0;
  return f;
}

const domain::Calibration& calibrated() {
  static const domain::Calibration c = domain::calibrate(quad_family());
  return c;
}

// ---- criteria ----

Outcome curvature() {
  double worst = 0.0;
  for (double k : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    for (const auto& [a, b] : {std::pair{0.3, 2.5}, std::pair{1.0, 4.2}, std::pair{5.0, 0.4}}) {
      const hyp::Arc arc = hyp::arc_between(hyp::IdealPoint(a), hyp::IdealPoint(b), k);
      for (double m : hyp::geodesic_curvature_oracle(arc, 20)) worst = std::max(worst, std::abs(m - k));
    }
  }
  double worst_circle = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    const hyp::Arc circle = hyp::make_circle_arc(Complex(0, 0), hyp::euclidean_radius(r), 0.0, kTwoPi);
    for (double m : hyp::geodesic_curvature_oracle(circle, 20)) {
      worst_circle = std::max(worst_circle, std::abs(m - 1.0 / std::tanh(r)));
    }
  }
  return {worst < 1e-6 && worst_circle < 1e-6,
          fmt::format("arc err {:.2e}, circle err {:.2e}", worst, worst_circle)};
}

Outcome gauss_bonnet() {
  auto polygon = [](std::vector<double> angles) {
    std::vector<hyp::Arc> chain;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      chain.push_back(
          hyp::arc_between(hyp::IdealPoint(angles[i]), hyp::IdealPoint(angles[(i + 1) % angles.size()]), 0.0));
    }
    return chain;
  };
  const double tri = std::abs(hyp::area(polygon({0.3, 1.1, 4.0})) - kPi);
  const double quad = std::abs(hyp::area(polygon({0.0, 1.0, 2.5, 4.0})) - kTwoPi);
  const double r1 = std::abs(hyp::gauss_bonnet_residual(truncated_polygon({0.0, 1.0, 2.5, 4.0}, {0, 0, 0, 0}, 0.1)));
  const double r2 = std::abs(
      hyp::gauss_bonnet_residual(truncated_polygon({0.0, 2.0, kPi, kPi + 2.0}, {0.4, -0.4, 0.4, -0.4}, 0.1)));
  const double r3 = std::abs(hyp::gauss_bonnet_residual(
      truncated_polygon({0.0, 1.0, 2.0, 3.2, 4.1, 5.0}, {0.2, -0.2, 0.2, -0.2, 0.2, -0.2}, 0.05)));
  const double worst = std::max({r1, r2, r3});
  return {tri < 1e-4 && quad < 1e-4 && worst < 1e-4,
          fmt::format("triangle err {:.2e}, quad err {:.2e}, region residual {:.2e}", tri, quad, worst)};
}

Outcome radial_convergence() {
  const double H = 0.25;
  const Complex c(0.1, 0.05);
  const auto exact = [&](Complex z) { return radial_oracle(H, hyp::dist(z, c)); };
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const MeshPtr m = disk_mesh(c, 1.5, h);
    const solver::Solution s = solver::solve_dirichlet(m, {{"circle", exact}}, H, tight());
    if (!s.report.converged) return {false, fmt::format("Newton failed at h = {}", h)};
    double e = 0.0;
    for (std::size_t i = 0; i < m->node_count(); ++i) e = std::max(e, std::abs(s.field[i] - exact(m->nodes[i])));
    errs.push_back(e);
  }
  const double order = std::log2(errs[0] / errs[2]) / 2;
  return {errs[1] < errs[0] && errs[2] < errs[1] && order >= 1.5 && errs[0] < 1e-2,
          fmt::format("errors {:.2e} {:.2e} {:.2e}, order {:.2f}", errs[0], errs[1], errs[2], order)};
}

Outcome jacobian() {
  const MeshPtr m = disk_mesh({-0.2, 0.1}, 1.2, 0.15);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField u = solver::interpolate(m, random_smooth(0.5));
    const ScalarField h = solver::interpolate(m, random_smooth(1.0));
    const double H = 0.3, eps = 1e-6;
    ScalarField up = u;
    for (std::size_t i = 0; i < up.size(); ++i) up[i] += eps * h[i];
    const ScalarField r0 = solver::residual(u, H), r1 = solver::residual(up, H);
    Eigen::VectorXd hv(h.size()), fd(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      hv[i] = h[i];
      fd[i] = (r1[i] - r0[i]) / eps;
    }
    const Eigen::VectorXd Kh = solver::linearize(u) * hv;
    worst = std::max(worst, (fd + Kh).norm() / Kh.norm());
  }
  return {worst < 1e-6, fmt::format("worst relative error {:.2e}", worst)};
}

Outcome comparison() {
  const std::vector<std::pair<MeshPtr, std::vector<std::string>>> meshes = {
      {disk_mesh({0.2, -0.1}, 1.3, 0.08), {"circle"}}, {annulus_mesh({0.0, 0.1}, 0.5, 1.2, 0.08), {"inner", "outer"}}};
  double worst = -1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto& [m, tags] = meshes[trial % 2];
    const auto phi1 = random_smooth(1.0);
    const auto bump = random_smooth(0.5);
    const auto phi2 = [&](Complex z) { return phi1(z) + bump(z) * bump(z); };
    solver::BoundaryData d1, d2;
    for (const auto& t : tags) {
      d1[t] = phi1;
      d2[t] = phi2;
    }
    const double H = 0.1 + 0.015 * trial;
    const solver::Solution s1 = solver::solve_dirichlet(m, d1, H, tight());
    const solver::Solution s2 = solver::solve_dirichlet(m, d2, H, tight());
    if (!s1.report.converged || !s2.report.converged) return {false, fmt::format("Newton failed in trial {}", trial)};
    worst = std::max(worst, -solver::inf_gap(s2.field, s1.field));
  }
  return {worst < 1e-10, fmt::format("largest violation {:.2e} over 20 pairs", std::max(worst, 0.0))};
}

struct StandardAnnulus {
  double H = 0.25;
  Complex center{0.1, -0.05};
  MeshPtr mesh;
  ScalarField u;
};

const StandardAnnulus& standard_annulus() {
  static const StandardAnnulus a = [] {
    StandardAnnulus s;
    s.mesh = annulus_mesh(s.center, 0.5, 1.2, 0.08);
    const auto phi = [&s](Complex z) { return radial_oracle(s.H, hyp::dist(z, s.center)); };
    s.u = solver::solve_dirichlet(s.mesh, {{"inner", phi}, {"outer", phi}}, s.H, tight()).field;
    return s;
  }();
  return a;
}

Outcome perron_newton() {
  const StandardAnnulus& a = standard_annulus();
  solver::SolverConfig cfg = tight();
  cfg.t_max = 0.4;
  cfg.steps = 4;
  cfg.sweep_tol = 1e-12;
  cfg.monotone_tol = 1e-12;
  const solver::BarrierResult b = solver::annulus_barrier(a.u, a.H, cfg);
  if (!(b.eps_reached > 0.0)) return {false, "barrier continuation failed"};
  const double t = b.eps_reached;
  const ScalarField lower = solver::max(solver::shift(a.u, -t / 2), solver::shift(b.fields.back(), -t));
  const ScalarField upper = solver::shift(a.u, t / 2);
  std::vector<solver::Disk> cover;
  const hyp::Mobius to_center = hyp::Mobius::moving_origin_to(a.center);
  for (int k = 0; k < 16; ++k) cover.push_back({to_center(std::polar(std::tanh(0.85 / 2), 2 * kPi * k / 16)), 0.55});
  solver::PerronResult p;
  try {
    p = solver::perron(lower, upper, cover, a.H, cfg);
  } catch (const solver::SolverError& e) {
    return {false, e.what()};
  }
  const solver::Solution direct = solver::solve_fixed(lower, a.mesh->boundary_mask(), a.H, cfg);
  const double diff = sup_diff(p.field, direct.field);
  return {p.report.converged && direct.report.converged && diff < 1e-5,
          fmt::format("sup diff {:.2e}, sweeps {}, monotone within 1e-12", diff, p.report.sweeps)};
}

Outcome barrier() {
  const StandardAnnulus& a = standard_annulus();
  solver::SolverConfig cfg = tight();
  cfg.t_max = 0.5;
  cfg.steps = 5;
  const solver::BarrierResult b = solver::annulus_barrier(a.u, a.H, cfg);
  bool ok = b.eps_reached > 0.0;
  double worst = 0.0;
  bool monotone = true;
  for (std::size_t k = 0; k < b.fields.size(); ++k) {
    const ScalarField& v = b.fields[k];
    worst = std::max({worst, -solver::inf_gap(v, a.u), -solver::inf_gap(solver::shift(a.u, b.t[k]), v)});
    if (k > 0 && solver::inf_gap(v, b.fields[k - 1]) < -1e-10) monotone = false;
  }
  ok = ok && worst <= 1e-10 && monotone;
  return {ok, fmt::format("eps_reached {}, {} fields, bracket violation {:.2e}", b.eps_reached, b.fields.size(),
                          std::max(worst, 0.0))};
}

Outcome calibration() {
  const domain::Calibration& c = calibrated();
  if (!c.found) return {false, c.message};
  const domain::CheckOptions defaults;
  domain::CheckOptions fine;
  fine.quad_tol = defaults.quad_tol / 10;
  const domain::SolvabilityReport refined =
      domain::check_solvability(c.domain, domain::default_horodisks(c.domain, 0.2), fine);
  bool inequalities = true;
  for (const auto& pc : c.report.polygon_checks) {
    inequalities = inequalities && pc.alpha_condition < -defaults.margin_tol && pc.beta_condition < -defaults.margin_tol;
  }
  const bool halved = c.report.halved_verdict.value_or(false) == c.report.verdict;
  const bool ok = std::abs(c.report.equality_residual) < 1e-8 && c.report.verdict && inequalities &&
                  refined.verdict == c.report.verdict && halved;
  return {ok, fmt::format("param {:.12f}, residual {:.2e}, {} polygon checks, stable under tightening and halving",
                          c.param, c.report.equality_residual, c.report.polygon_checks.size())};
}

Outcome flux_stokes() {
  const domain::Calibration& c = calibrated();
  const auto fams = flux::halving_families(c.domain, 0.2, 3);
  mesh::RefinementSpec spec;
  spec.target_h = 0.1;
  const MeshPtr m = std::make_shared<const mesh::TriMesh>(mesh::mesh_truncated_domain(c.domain, fams[0], spec));
  solver::SolverConfig cfg = tight();
  cfg.cap_M = 10.0;
  const solver::ScherkResult sr = solver::scherk_approx(m, c.domain, c.domain.H, cfg);
  const flux::FluxReport rep = flux::flux_report(sr.field, c.domain.H, nullptr, 1);
  double worst_gap = INFINITY;
  for (const auto& cf : rep.curves) worst_gap = std::min(worst_gap, cf.length + 1e-8 - std::abs(cf.flux_u));
  std::vector<double> L;
  for (const auto& f : fams) L.push_back(flux::horocycle_length(c.domain, f));
  const bool decreasing = L[1] < L[0] && L[2] < L[1];
  return {std::abs(rep.stokes_residual) < 1e-3 && worst_gap >= 0.0 && decreasing,
          fmt::format("Stokes residual {:.2e}, min slack {:.2e}, sum|C| {:.4f} {:.4f} {:.4f}", rep.stokes_residual,
                      worst_gap, L[0], L[1], L[2])};
}

Outcome uniqueness() {
  const domain::Calibration& c = calibrated();
  flux::UniquenessOptions opt;
  opt.B_y = {{0.0, 0.0}, 0.3};
  opt.probe_width = 0.3;
  opt.eps_prime = 0.05;
  opt.spec.target_h = 0.1;
  solver::SolverConfig cfg = tight();
  cfg.cap_M = 10.0;
  const flux::UniquenessTable t =
      flux::uniqueness_experiment(c.domain, flux::halving_families(c.domain, 0.2, 3), opt, c.domain.H, cfg);
  if (t.stopped || t.rows.size() != 3) return {false, t.stopped.value_or("fewer than 3 levels")};
  const auto& r3 = t.rows[2];
  const bool bound = std::abs(r3.dBy_diff_flux) <= 2 * r3.sum_C_length + 1e-6;
  return {t.sup_gap_nonincreasing && t.flux_nonincreasing && bound,
          fmt::format("sup gap {:.2e} {:.2e} {:.2e}, |dBy flux| {:.2e} {:.2e} {:.2e}", t.rows[0].sup_gap,
                      t.rows[1].sup_gap, t.rows[2].sup_gap, std::abs(t.rows[0].dBy_diff_flux),
                      std::abs(t.rows[1].dBy_diff_flux), std::abs(r3.dBy_diff_flux))};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCHERKLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void shifted_field(const fs::path& in, const fs::path& out, double shift) {
  std::ifstream is(in);
  std::ofstream os(out);
  os.precision(17);
  std::string line;
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
    os << id << "," << x << "," << y << "," << std::stod(u) + shift << "\n";
  }
}

Outcome halfspace() {
  const fs::path dir = fs::temp_directory_path() / ("scherklab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string family = std::string(SCHERKLAB_TEST_DATA) + "/quad_family.json";
  if (run_cli("--out " + (dir / "cal").string() + " calibrate " + family) != 0) return {false, "calibrate failed"};
  const std::string dom = (dir / "cal" / "calibrated_domain.json").string();
  if (run_cli("--out " + (dir / "solve").string() + " solve " + dom + " --cap-M 10") != 0) {
    return {false, "solve failed"};
  }
  shifted_field(dir / "solve" / "field.csv", dir / "S_up.csv", 0.7);
  shifted_field(dir / "solve" / "field.csv", dir / "S_eq.csv", 0.0);
  const std::string base = " halfspace " + dom + " --cap-M 10 --surface ";
  const int rc3 = run_cli("--out " + (dir / "up").string() + base + (dir / "S_up.csv").string());
  const int rc1 = run_cli("--out " + (dir / "eq").string() + base + (dir / "S_eq.csv").string() + " --levels 0");
  if (rc3 == 2 || rc1 == 2) return {false, "halfspace rejected its input"};
  const json up = load(dir / "up" / "halfspace.json");
  const json eq = load(dir / "eq" / "halfspace.json");
  const double alpha = up["alpha"].get<double>();
  const bool ok = up["case"] == 3 && std::abs(alpha - 0.7) <= 1e-10 && up["verdict"] == "translate detected" &&
                  eq["case"] == 1;
  fs::remove_all(dir);
  return {ok, fmt::format("S = u + 0.7: case {}, alpha {:.12f}, {}; S = u: case {}", up["case"].get<int>(), alpha,
                          up["verdict"].get<std::string>(), eq["case"].get<int>())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    double limit_s;
  };
  const Criterion all[] = {
      {1, "curvature oracle", curvature, 5},
      {2, "Gauss-Bonnet", gauss_bonnet, 30},
      {3, "radial solver convergence", radial_convergence, 120},
      {4, "Jacobian exactness", jacobian, 0},
      {5, "comparison principle", comparison, 0},
      {6, "Perron limit equals Newton", perron_newton, 0},
      {7, "barrier continuation", barrier, 0},
      {8, "calibration", calibration, 0},
      {9, "flux and Stokes", flux_stokes, 0},
      {10, "uniqueness trend", uniqueness, 600},
      {11, "half-space desk test", halfspace, 0},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {} s limit", c.limit_s);
    }
    failed += o.pass ? 0 : 1;
    std::cout << fmt::format("criterion {:2d} {}  {}: {} [{:.2f} s]", c.id, o.pass ? "PASS" : "FAIL", c.name,
                             o.detail, secs)
              << std::endl;
  }
  std::cout << fmt::format("{} of 11 criteria passed", 11 - failed) << std::endl;
  return failed == 0 ? 0 : 1;
}

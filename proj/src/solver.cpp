#include "scherklab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include "json.hpp"

#include "quadrature.hpp"

namespace scherklab::solver {

namespace {

struct Element {
  std::array<int, 3> v;
  double area;
  std::array<Eigen::Vector2d, 3> grad;  // basis gradients
  double lambda2;                       // at the centroid
};

std::vector<Element> elements(const mesh::TriMesh& m) {
  std::vector<Element> out;
  out.reserve(m.triangles.size());
  for (const auto& t : m.triangles) {
    Element e;
    e.v = t;
    const Complex p0 = m.nodes[t[0]], p1 = m.nodes[t[1]], p2 = m.nodes[t[2]];
    const double twice = (p1 - p0).real() * (p2 - p0).imag() - (p1 - p0).imag() * (p2 - p0).real();
    if (!(twice > 0.0)) throw SolverError("mesh has a degenerate or clockwise triangle");
    e.area = 0.5 * twice;
    const std::array<Complex, 3> p = {p0, p1, p2};
    for (int i = 0; i < 3; ++i) {
      const Complex a = p[(i + 1) % 3], b = p[(i + 2) % 3];
      e.grad[i] = Eigen::Vector2d(a.imag() - b.imag(), b.real() - a.real()) / twice;
    }
    e.lambda2 = hyp::lambda2((p0 + p1 + p2) / 3.0);
    out.push_back(e);
  }
  return out;
}

// int lambda^2 phi_i over the mesh.
std::vector<double> load(const mesh::TriMesh& m, int order) {
  std::vector<double> b(m.nodes.size(), 0.0);
  for (const auto& t : m.triangles) {
    const Complex p0 = m.nodes[t[0]], p1 = m.nodes[t[1]], p2 = m.nodes[t[2]];
    const double area = 0.5 * std::abs((p1 - p0).real() * (p2 - p0).imag() - (p1 - p0).imag() * (p2 - p0).real());
    if (order == 1) {
      const double l2 = hyp::lambda2((p0 + p1 + p2) / 3.0);
      for (int i = 0; i < 3; ++i) b[t[i]] += area * l2 / 3.0;
      continue;
    }
    for (const auto& q : scherklab::detail::rule7()) {
      const double l2 = hyp::lambda2(q.l1 * p0 + q.l2 * p1 + q.l3 * p2);
      b[t[0]] += area * q.w * l2 * q.l1;
      b[t[1]] += area * q.w * l2 * q.l2;
      b[t[2]] += area * q.w * l2 * q.l3;
    }
  }
  return b;
}

Eigen::Vector2d gradient(const Element& e, const std::vector<double>& u) {
  return u[e.v[0]] * e.grad[0] + u[e.v[1]] * e.grad[1] + u[e.v[2]] * e.grad[2];
}

void check_same(const ScalarField& f, const ScalarField& g) {
  if (!f.mesh || f.mesh != g.mesh) throw SolverError("fields live on different meshes");
}

void check_field(const ScalarField& u) {
  if (!u.mesh) throw SolverError("field has no mesh");
  if (u.values.size() != u.mesh->nodes.size()) throw SolverError("field size does not match its mesh");
}

std::vector<double> residual_values(const std::vector<Element>& els,
                                    const std::vector<double>& b, const std::vector<double>& u, double H) {
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = -2.0 * H * b[i];
  for (const auto& e : els) {
    const Eigen::Vector2d g = gradient(e, u);
    const double W = std::sqrt(1.0 + g.squaredNorm() / e.lambda2);
    for (int i = 0; i < 3; ++i) r[e.v[i]] -= e.area * g.dot(e.grad[i]) / W;
  }
  return r;
}

// Local 3x3 block of K = -dR/du.
Eigen::Matrix3d local_jacobian(const Element& e, const std::vector<double>* u) {
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  if (u) {
    const Eigen::Vector2d g = gradient(e, *u);
    const double W2 = 1.0 + g.squaredNorm() / e.lambda2;
    const double W = std::sqrt(W2);
    M = (Eigen::Matrix2d::Identity() - g * g.transpose() / (e.lambda2 * W2)) / W;
  }
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = e.area * e.grad[i].dot(M * e.grad[j]);
  }
  return k;
}

double norm_free(const std::vector<double>& r, const std::vector<char>& fixed) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!fixed[i]) s += r[i] * r[i];
  }
  return std::sqrt(s);
}

double bound_of(const std::vector<Element>& els, const std::vector<double>& u) {
  double best = 0.0;
  for (const auto& e : els) {
    const double s = gradient(e, u).squaredNorm() / e.lambda2;
    best = std::max(best, std::sqrt(s / (1.0 + s)));
  }
  return best;
}

// Free-node system for the stiffness K (at u, or the plain Laplacian).
struct FreeSystem {
  std::vector<int> index;  // node -> free index or -1
  int n = 0;
};

FreeSystem free_system(const std::vector<char>& fixed) {
  FreeSystem fs;
  fs.index.assign(fixed.size(), -1);
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!fixed[i]) fs.index[i] = fs.n++;
  }
  return fs;
}

Eigen::SparseMatrix<double> assemble_free(const std::vector<Element>& els, const FreeSystem& fs,
                                          const std::vector<double>* u) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(els.size() * 9);
  for (const auto& e : els) {
    const Eigen::Matrix3d k = local_jacobian(e, u);
    for (int i = 0; i < 3; ++i) {
      const int a = fs.index[e.v[i]];
      if (a < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int b = fs.index[e.v[j]];
        if (b >= 0) trip.emplace_back(a, b, k(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> K(fs.n, fs.n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

// Harmonic extension of the fixed values.
std::vector<double> harmonic_extension(const std::vector<Element>& els, const std::vector<double>& start,
                                       const std::vector<char>& fixed) {
  const FreeSystem fs = free_system(fixed);
  std::vector<double> u = start;
  if (fs.n == 0) return u;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fs.n);
  for (const auto& e : els) {
    const Eigen::Matrix3d k = local_jacobian(e, nullptr);
    for (int i = 0; i < 3; ++i) {
      const int a = fs.index[e.v[i]];
      if (a < 0) continue;
      for (int j = 0; j < 3; ++j) {
        if (fs.index[e.v[j]] < 0) rhs[a] -= k(i, j) * start[e.v[j]];
      }
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(assemble_free(els, fs, nullptr));
  if (ldlt.info() != Eigen::Success) throw SolverError("Laplace system is singular");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (fs.index[i] >= 0) u[i] = x[fs.index[i]];
  }
  return u;
}

// Value at each boundary node: the tag of the boundary edge leaving it.
std::vector<std::string> leaving_tags(const mesh::TriMesh& m) {
  std::vector<std::string> tags(m.nodes.size());
  for (const auto& e : m.boundary) tags[e.a] = e.tag;
  return tags;
}

}  // namespace

// --- fields ----------------------------------------------------------------

ScalarField::ScalarField(MeshPtr m, double fill) : mesh(std::move(m)) {
  if (!mesh) throw SolverError("field has no mesh");
  values.assign(mesh->nodes.size(), fill);
}

ScalarField::ScalarField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
  check_field(*this);
}

std::optional<double> ScalarField::evaluate(Complex z) const {
  for (const auto& t : mesh->triangles) {
    const Complex p0 = mesh->nodes[t[0]], p1 = mesh->nodes[t[1]], p2 = mesh->nodes[t[2]];
    auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
    const double total = cross(p1 - p0, p2 - p0);
    const double l0 = cross(p2 - p1, z - p1) / total;
    const double l1 = cross(p0 - p2, z - p2) / total;
    const double l2 = 1.0 - l0 - l1;
    const double eps = -1e-12;
    if (l0 >= eps && l1 >= eps && l2 >= eps) return l0 * values[t[0]] + l1 * values[t[1]] + l2 * values[t[2]];
  }
  return std::nullopt;
}

ScalarField interpolate(MeshPtr m, const std::function<double(Complex)>& f) {
  ScalarField u(m);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(m->nodes[i]);
  return u;
}

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0)) throw SolverError("newton_tol must be positive");
  if (max_iter < 1) throw SolverError("max_iter must be at least 1");
  if (quadrature_order != 1 && quadrature_order != 7) throw SolverError("quadrature order must be 1 or 7");
  if (!(cap_M >= 0.0) || !(cap_step > 0.0)) throw SolverError("cap_M must be >= 0 and cap_step > 0");
  if (steps < 1) throw SolverError("steps must be at least 1");
  if (!(sweep_tol > 0.0)) throw SolverError("sweep_tol must be positive");
}

ScalarField max(const ScalarField& f, const ScalarField& g) {
  check_same(f, g);
  ScalarField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(f[i], g[i]);
  return out;
}

ScalarField min(const ScalarField& f, const ScalarField& g) {
  check_same(f, g);
  ScalarField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(f[i], g[i]);
  return out;
}

ScalarField shift(const ScalarField& f, double c) {
  ScalarField out = f;
  for (double& v : out.values) v += c;
  return out;
}

double inf_gap(const ScalarField& f, const ScalarField& g) {
  check_same(f, g);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) best = std::min(best, f[i] - g[i]);
  return best;
}

// --- operator --------------------------------------------------------------

ScalarField residual(const ScalarField& u, double H, const SolverConfig& config) {
  check_field(u);
  const auto els = elements(*u.mesh);
  const auto b = load(*u.mesh, config.quadrature_order);
  return ScalarField(u.mesh, residual_values(els, b, u.values, H));
}

Eigen::SparseMatrix<double> linearize(const ScalarField& u) {
  check_field(u);
  const auto els = elements(*u.mesh);
  const FreeSystem fs = free_system(std::vector<char>(u.size(), 0));
  return assemble_free(els, fs, &u.values);
}

double gradient_bound(const ScalarField& u) {
  check_field(u);
  return bound_of(elements(*u.mesh), u.values);
}

double residual_norm(const ScalarField& r, const std::vector<char>& fixed) {
  if (fixed.size() != r.size()) throw SolverError("mask size does not match the field");
  return norm_free(r.values, fixed);
}

// --- Newton ----------------------------------------------------------------

Solution solve_fixed(const ScalarField& start, const std::vector<char>& fixed, double H, const SolverConfig& config) {
  check_field(start);
  config.validate();
  if (fixed.size() != start.size()) throw SolverError("mask size does not match the field");
  for (double v : start.values) {
    if (!std::isfinite(v)) throw SolverError("start values must be finite");
  }
  const mesh::TriMesh& m = *start.mesh;
  const auto els = elements(m);
  const auto b = load(m, config.quadrature_order);
  const FreeSystem fs = free_system(fixed);

  std::vector<double> u = start.values;
  std::vector<double> r = residual_values(els, b, u, H);
  double norm = norm_free(r, fixed);
  NewtonReport rep;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  while (norm > config.newton_tol && rep.iterations < config.max_iter && fs.n > 0) {
    const Eigen::SparseMatrix<double> K = assemble_free(els, fs, &u);
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) break;
    Eigen::VectorXd rhs(fs.n);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (fs.index[i] >= 0) rhs[fs.index[i]] = r[i];
    }
    const Eigen::VectorXd delta = ldlt.solve(rhs);
    ++rep.iterations;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= (config.damping ? 30 : 0); ++halving) {
      std::vector<double> trial = u;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (fs.index[i] >= 0) trial[i] += step * delta[fs.index[i]];
      }
      std::vector<double> rt = residual_values(els, b, trial, H);
      const double nt = norm_free(rt, fixed);
      if (!config.damping || nt < norm) {
        u = std::move(trial);
        r = std::move(rt);
        norm = nt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  rep.residual_norm = norm;
  rep.converged = norm <= config.newton_tol;
  rep.gradient_bound = bound_of(els, u);
  Solution sol;
  sol.report = rep;
  if (rep.converged) sol.field = ScalarField(start.mesh, std::move(u));
  return sol;
}

Solution solve_dirichlet(MeshPtr m, const BoundaryData& data, double H, const SolverConfig& config,
                         const ScalarField* initial) {
  if (!m) throw SolverError("no mesh");
  const auto tags = leaving_tags(*m);
  std::vector<char> fixed = m->boundary_mask();
  std::vector<double> values(m->nodes.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!fixed[i]) continue;
    auto it = data.find(tags[i]);
    if (it == data.end()) throw SolverError(fmt::format("no boundary data for tag '{}'", tags[i]));
    values[i] = it->second(m->nodes[i]);
    if (!std::isfinite(values[i])) throw SolverError(fmt::format("non-finite boundary data on tag '{}'", tags[i]));
  }
  if (initial) {
    check_field(*initial);
    if (initial->mesh != m) throw SolverError("initial field lives on a different mesh");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!fixed[i]) values[i] = (*initial)[i];
    }
  } else {
    values = harmonic_extension(elements(*m), values, fixed);
  }
  return solve_fixed(ScalarField(m, std::move(values)), fixed, H, config);
}

// --- disk replacement and Perron -----------------------------------------

DiskPatch make_patch(const mesh::TriMesh& m, const Disk& disk) {
  DiskPatch p;
  p.disk = disk;
  try {
    p.sub = mesh::restrict_to_disk(m, disk.center, disk.radius);
  } catch (const mesh::MeshError& e) {
    throw SolverError(fmt::format("disk at ({}, {}) radius {}: {}", disk.center.real(), disk.center.imag(),
                                  disk.radius, e.what()));
  }
  p.mesh = std::make_shared<const mesh::TriMesh>(p.sub.mesh);
  p.fixed = p.mesh->boundary_mask();
  if (std::find(p.fixed.begin(), p.fixed.end(), 0) == p.fixed.end()) {
    throw SolverError("disk contains no interior mesh node");
  }
  return p;
}

ScalarField disk_replace(const ScalarField& w, const DiskPatch& patch, double H, const SolverConfig& config) {
  check_field(w);
  ScalarField local(patch.mesh);
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = w[patch.sub.node_map[i]];
  const Solution sol = solve_fixed(local, patch.fixed, H, config);
  if (!sol.report.converged) {
    throw SolverError(fmt::format("local solve failed on disk at ({}, {}): residual {}", patch.disk.center.real(),
                                  patch.disk.center.imag(), sol.report.residual_norm));
  }
  ScalarField out = w;
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (!patch.fixed[i]) out[patch.sub.node_map[i]] = sol.field[i];
  }
  return out;
}

ScalarField disk_replace(const ScalarField& w, const Disk& disk, double H, const SolverConfig& config) {
  check_field(w);
  return disk_replace(w, make_patch(*w.mesh, disk), H, config);
}

bool is_subsolution(const ScalarField& w, const std::vector<Disk>& cover, double H, const SolverConfig& config,
                    double tol) {
  for (const Disk& d : cover) {
    const ScalarField lifted = disk_replace(w, d, H, config);
    if (inf_gap(lifted, w) < -tol) return false;
  }
  return true;
}

PerronResult perron(const ScalarField& u_minus, const ScalarField& u_plus, const std::vector<Disk>& cover, double H,
                    const SolverConfig& config) {
  check_field(u_minus);
  check_same(u_minus, u_plus);
  config.validate();
  if (cover.empty()) throw SolverError("empty disk cover");
  if (inf_gap(u_plus, u_minus) < -config.monotone_tol) throw SolverError("u_minus exceeds u_plus");
  std::vector<DiskPatch> patches;
  for (const Disk& d : cover) patches.push_back(make_patch(*u_minus.mesh, d));
  std::vector<char> covered = u_minus.mesh->boundary_mask();
  for (const auto& p : patches) {
    for (std::size_t i = 0; i < p.fixed.size(); ++i) {
      if (!p.fixed[i]) covered[p.sub.node_map[i]] = 1;
    }
  }
  const auto missing = std::count(covered.begin(), covered.end(), 0);
  if (missing > 0) throw SolverError(fmt::format("disk cover leaves {} interior nodes uncovered", missing));

  PerronResult res;
  ScalarField w = u_minus;
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const ScalarField before = w;
    for (std::size_t k = 0; k < patches.size(); ++k) {
      ScalarField next = min(disk_replace(w, patches[k], H, config), u_plus);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (next[i] < w[i] - config.monotone_tol) {
          throw SolverError(fmt::format(
              "Perron iterate decreased by {:.3e} at node {} on disk {} of sweep {}; u_plus is not a supersolution "
              "or u_minus not a subsolution",
              w[i] - next[i], i, k, sweep + 1));
        }
      }
      w = std::move(next);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) change = std::max(change, std::abs(w[i] - before[i]));
    res.report.sweeps = sweep + 1;
    res.report.last_change = change;
    res.report.sweep_changes.push_back(change);
    if (change < config.sweep_tol) {
      res.report.converged = true;
      break;
    }
  }
  res.report.residual_norm = residual_norm(residual(w, H, config), w.mesh->boundary_mask());
  res.field = std::move(w);
  return res;
}

// --- annulus barrier -------------------------------------------------------

BarrierResult annulus_barrier(const ScalarField& u, double H, const SolverConfig& config) {
  check_field(u);
  config.validate();
  const mesh::TriMesh& m = *u.mesh;
  const auto tags = leaving_tags(m);
  const std::vector<char> fixed = m.boundary_mask();
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (fixed[i] && tags[i] != "inner" && tags[i] != "outer") {
      throw SolverError(fmt::format("annulus mesh has unexpected boundary tag '{}'", tags[i]));
    }
  }
  BarrierResult res;
  ScalarField prev = u;
  for (int k = 0; k <= config.steps; ++k) {
    const double t = config.t_max * k / config.steps;
    ScalarField start = prev;
    for (std::size_t i = 0; i < start.size(); ++i) {
      if (fixed[i]) start[i] = u[i] + (tags[i] == "inner" ? t : 0.0);
    }
    const Solution sol = solve_fixed(start, fixed, H, config);
    if (!sol.report.converged) {
      res.first_failure = t;
      break;
    }
    res.t.push_back(t);
    res.fields.push_back(sol.field);
    res.reports.push_back(sol.report);
    res.eps_reached = t;
    prev = sol.field;
  }
  return res;
}

// --- capped Scherk problem -------------------------------------------------

std::vector<double> capped_data(const mesh::TriMesh& m, const domain::ScherkDomain& d, double M, double c_cap) {
  const int n = static_cast<int>(d.size());
  std::vector<double> values(m.nodes.size(), 0.0);
  auto sign_of = [&](int edge) { return d.labels[((edge % n) + n) % n] == hyp::ArcLabel::A ? 1.0 : -1.0; };
  std::map<std::string, std::vector<const mesh::TaggedEdge*>> by_tag;
  for (const auto& e : m.boundary) by_tag[e.tag].push_back(&e);
  for (const auto& [tag, edges] : by_tag) {
    if (tag.size() < 2 || (tag[0] != 'A' && tag[0] != 'B' && tag[0] != 'C')) {
      throw SolverError(fmt::format("unexpected boundary tag '{}' for the capped problem", tag));
    }
    const int k = std::stoi(tag.substr(1));
    if (tag[0] != 'C') {
      const double v = tag[0] == 'A' ? M : -M;
      for (const auto* e : edges) values[e->a] = values[e->b] = v;
      continue;
    }
    // Order the horocycle chain and interpolate in hyperbolic arc length.
    std::map<int, const mesh::TaggedEdge*> from;
    std::map<int, int> indegree;
    for (const auto* e : edges) {
      from[e->a] = e;
      indegree[e->b]++;
    }
    int first = -1;
    for (const auto* e : edges) {
      if (!indegree.count(e->a)) first = e->a;
    }
    if (first < 0) throw SolverError(fmt::format("horocycle tag '{}' is not an open chain", tag));
    std::vector<int> chain = {first};
    std::vector<double> s = {0.0};
    for (auto it = from.find(first); it != from.end(); it = from.find(chain.back())) {
      const Complex a = m.nodes[it->second->a], b = m.nodes[it->second->b];
      s.push_back(s.back() + hyp::dist(a, b));
      chain.push_back(it->second->b);
      if (chain.size() > edges.size() + 1) throw SolverError("horocycle chain has a cycle");
    }
    const double cm = c_cap > 0.0 ? std::min(M, c_cap) : M;
    const double v0 = sign_of(k - 1) * cm, v1 = sign_of(k) * cm;
    for (std::size_t i = 0; i < chain.size(); ++i) values[chain[i]] = v0 + (v1 - v0) * s[i] / s.back();
  }
  return values;
}

ScherkResult scherk_approx(MeshPtr m, const domain::ScherkDomain& d, double H, const SolverConfig& config) {
  if (!m) throw SolverError("no mesh");
  config.validate();
  const std::vector<char> fixed = m->boundary_mask();
  ScherkResult res;
  ScalarField current(m, 0.0);
  {
    const Solution sol = solve_fixed(current, fixed, H, config);
    if (!sol.report.converged) throw SolverError("capped problem failed at M = 0");
    current = sol.field;
    res.caps.push_back(0.0);
    res.reports.push_back(sol.report);
  }
  double M = 0.0;
  double step = std::min(config.cap_step, config.cap_M);
  int failures = 0;
  while (M < config.cap_M && failures < 8) {
    const double target = std::min(config.cap_M, M + step);
    const std::vector<double> data = capped_data(*m, d, target, config.c_cap);
    ScalarField start = current;
    for (std::size_t i = 0; i < start.size(); ++i) {
      if (fixed[i]) start[i] = data[i];
    }
    const Solution sol = solve_fixed(start, fixed, H, config);
    if (!sol.report.converged) {
      step *= 0.5;
      ++failures;
      continue;
    }
    failures = 0;
    M = target;
    current = sol.field;
    res.caps.push_back(M);
    res.reports.push_back(sol.report);
  }
  res.M_reached = M;
  res.reached_cap = M >= config.cap_M;
  res.field = current;
  return res;
}

// --- radial oracle -----------------------------------------------------------

double radial_slope(double H, double rho) {
  const double q = 2.0 * H * std::tanh(0.5 * rho);
  return q / std::sqrt(1.0 - q * q);
}

double radial_value(double H, double rho) {
  if (!(H > 0.0 && H < 0.5)) throw SolverError("radial oracle needs 0 < H < 1/2");
  if (rho <= 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate([H](double r) { return radial_slope(H, r); }, 0.0, rho, 8, 1e-13);
}

RadialProfile radial_oracle(double H, double rho_max, int n) {
  if (!(H > 0.0 && H < 0.5)) throw SolverError("radial oracle needs 0 < H < 1/2");
  if (!(rho_max > 0.0) || n < 1) throw SolverError("radial oracle needs rho_max > 0 and n >= 1");
  using boost::math::quadrature::gauss_kronrod;
  RadialProfile p;
  p.H = H;
  double u = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double rho = rho_max * k / n;
    if (k > 0) {
      u += gauss_kronrod<double, 31>::integrate([H](double r) { return radial_slope(H, r); }, p.rho.back(), rho, 8,
                                                1e-13);
    }
    p.rho.push_back(rho);
    p.u.push_back(u);
    p.du.push_back(radial_slope(H, rho));
  }
  return p;
}

// --- output ------------------------------------------------------------------

std::string field_csv(const ScalarField& u) {
  check_field(u);
  std::ostringstream os;
  os.precision(17);
  os << "node_id,x,y,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    os << i << ',' << u.mesh->nodes[i].real() << ',' << u.mesh->nodes[i].imag() << ',' << u[i] << '\n';
  }
  return os.str();
}

std::string report_json(const NewtonReport& r) {
  nlohmann::json j = {{"iterations", r.iterations},
                      {"residual_norm", r.residual_norm},
                      {"converged", r.converged},
                      {"gradient_bound", r.gradient_bound}};
  return j.dump();
}

std::string report_json(const PerronReport& r) {
  nlohmann::json j = {{"sweeps", r.sweeps},
                      {"last_change", r.last_change},
                      {"converged", r.converged},
                      {"residual_norm", r.residual_norm},
                      {"sweep_changes", r.sweep_changes}};
  return j.dump();
}

}  // namespace scherklab::solver

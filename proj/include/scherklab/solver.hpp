#pragma once

// P1 finite elements for the constant mean curvature graph equation
//   div(grad u / W) = 2H,  W = sqrt(1 + |grad u|^2),
// in the hyperbolic metric, written in disk coordinates.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "scherklab/domain.hpp"
#include "scherklab/mesh.hpp"

namespace scherklab::solver {

using MeshPtr = std::shared_ptr<const mesh::TriMesh>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nodal values on a mesh.
struct ScalarField {
  MeshPtr mesh;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(MeshPtr m, double fill = 0.0);
  ScalarField(MeshPtr m, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  /// Linear interpolation at z; nullopt outside the mesh.
  std::optional<double> evaluate(Complex z) const;
};

ScalarField interpolate(MeshPtr m, const std::function<double(Complex)>& f);

struct SolverConfig {
  double newton_tol = 1e-11;
  int max_iter = 60;
  bool damping = true;
  /// Points of the triangle rule for the 2H load term: 1 or 7.
  int quadrature_order = 7;
  double cap_M = 20.0;
  /// Largest cap increment in scherk_approx continuation.
  double cap_step = 2.0;
  /// Bound on the horocycle data in scherk_approx; 0 interpolates between +-M.
  double c_cap = 0.0;
  double t_max = 0.5;
  int steps = 10;
  double sweep_tol = 1e-8;
  int max_sweeps = 500;
  /// Allowed decrease of a Perron iterate before the run aborts.
  double monotone_tol = 1e-12;

  void validate() const;
};

struct NewtonReport {
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  /// max over triangles of |grad u|_g / W.
  double gradient_bound = 0.0;
};

/// Weak residual at every node:
///   R_i = -int grad u . grad phi_i / W - 2H int lambda^2 phi_i.
/// W uses lambda^2 at the triangle centroid.
ScalarField residual(const ScalarField& u, double H, const SolverConfig& config = {});

/// K = -dR/du over all nodes, the linearized operator
/// h -> div((grad h - (grad u / W) <grad u / W, grad h>) / W).
Eigen::SparseMatrix<double> linearize(const ScalarField& u);

double gradient_bound(const ScalarField& u);

/// Euclidean norm of the residual over nodes not in `fixed`.
double residual_norm(const ScalarField& r, const std::vector<char>& fixed);

/// Dirichlet data per boundary tag.
using BoundaryData = std::map<std::string, std::function<double(Complex)>>;

struct Solution {
  ScalarField field;
  NewtonReport report;
};

/// Damped Newton with the nodes in `fixed` held at their values in `start`.
/// `field` is left empty when Newton does not converge.
Solution solve_fixed(const ScalarField& start, const std::vector<char>& fixed, double H, const SolverConfig& config);

/// Dirichlet problem on the whole mesh. Every boundary tag needs data. The
/// start is the harmonic extension of the data unless `initial` is given.
Solution solve_dirichlet(MeshPtr m, const BoundaryData& data, double H, const SolverConfig& config,
                         const ScalarField* initial = nullptr);

struct Disk {
  Complex center;
  double radius = 0.5;
};

/// Precomputed sub-mesh of the triangles inside a disk.
struct DiskPatch {
  Disk disk;
  mesh::SubMesh sub;
  MeshPtr mesh;
  std::vector<char> fixed;
};

DiskPatch make_patch(const mesh::TriMesh& m, const Disk& disk);

/// w outside the disk; inside, the solution with data w on the patch boundary.
ScalarField disk_replace(const ScalarField& w, const DiskPatch& patch, double H, const SolverConfig& config);
ScalarField disk_replace(const ScalarField& w, const Disk& disk, double H, const SolverConfig& config);

/// w <= M_disk(w) + tol on every disk of the cover.
bool is_subsolution(const ScalarField& w, const std::vector<Disk>& cover, double H, const SolverConfig& config,
                    double tol = 1e-12);

struct PerronReport {
  int sweeps = 0;
  double last_change = 0.0;
  bool converged = false;
  /// Residual norm of the limit over nodes not on the mesh boundary.
  double residual_norm = 0.0;
  std::vector<double> sweep_changes;
};

struct PerronResult {
  ScalarField field;
  PerronReport report;
};

/// Sweeps of disk replacement in cover order, each followed by min with
/// u_plus. Throws SolverError when an iterate decreases by more than
/// config.monotone_tol.
PerronResult perron(const ScalarField& u_minus, const ScalarField& u_plus, const std::vector<Disk>& cover, double H,
                    const SolverConfig& config);

struct BarrierResult {
  std::vector<double> t;
  std::vector<ScalarField> fields;
  std::vector<NewtonReport> reports;
  double eps_reached = 0.0;
  /// First t at which Newton failed, if any.
  std::optional<double> first_failure;
};

/// Continuation in t of the annulus problem with data u on "outer" and u + t
/// on "inner", for t = t_max k / steps.
BarrierResult annulus_barrier(const ScalarField& u, double H, const SolverConfig& config);

struct ScherkResult {
  ScalarField field;
  double M_reached = 0.0;
  bool reached_cap = false;
  std::vector<double> caps;
  std::vector<NewtonReport> reports;
  std::string c_data_rule = "linear in hyperbolic arc length between the adjacent caps";
};

/// Boundary data for the capped problem: +M on A edges, -M on B edges,
/// linear in arc length along each horocycle arc between the neighbouring
/// values. With c_cap > 0 the horocycle values are clamped to +-c_cap.
std::vector<double> capped_data(const mesh::TriMesh& m, const domain::ScherkDomain& d, double M,
                                double c_cap = 0.0);

/// Continuation in the cap M up to config.cap_M on a mesh produced by
/// mesh_truncated_domain for `d`.
ScherkResult scherk_approx(MeshPtr m, const domain::ScherkDomain& d, double H, const SolverConfig& config);

struct RadialProfile {
  double H = 0.0;
  std::vector<double> rho;
  std::vector<double> u;
  std::vector<double> du;
};

/// u'(rho) = 2H tanh(rho/2) / sqrt(1 - 4H^2 tanh^2(rho/2)).
double radial_slope(double H, double rho);
/// u(rho) with u(0) = 0, by adaptive quadrature of the slope.
double radial_value(double H, double rho);
RadialProfile radial_oracle(double H, double rho_max, int n);

ScalarField max(const ScalarField& f, const ScalarField& g);
ScalarField min(const ScalarField& f, const ScalarField& g);
ScalarField shift(const ScalarField& f, double c);
/// min over nodes of f - g.
double inf_gap(const ScalarField& f, const ScalarField& g);

/// Rows "node_id,x,y,u".
std::string field_csv(const ScalarField& u);
std::string report_json(const NewtonReport& r);
std::string report_json(const PerronReport& r);

}  // namespace scherklab::solver

#pragma once

// Flux of grad u / W through element-aligned curves, Stokes checks, and the
// horodisk exhaustion experiments.

#include <optional>
#include <string>
#include <vector>

#include "scherklab/domain.hpp"
#include "scherklab/mesh.hpp"
#include "scherklab/solver.hpp"

namespace scherklab::flux {

using solver::ScalarField;

/// Sign convention written into every report.
inline constexpr const char* kConvention =
    "eta is the outward conormal of the region on the left of the oriented curve";

enum class FluxMethod {
  /// Per-element gradient through each edge, W at the edge midpoint.
  Element,
  /// Boundary reactions -R_i of the weak residual, halved at open curve ends.
  Reaction,
};

struct CurveEdge {
  int a = 0;
  int b = 0;
  /// Triangle on the region side.
  int triangle = 0;
};

/// Oriented chain of mesh edges. sign = -1 reverses the orientation.
struct Curve {
  std::string tag;
  std::vector<CurveEdge> edges;
  double sign = 1.0;
};

/// Boundary edges carrying any of `tags`, region = the mesh.
Curve boundary_curve(const mesh::TriMesh& m, const std::vector<std::string>& tags);
/// Interface edges with `tag`; the region is the side with region id `region`.
Curve interface_curve(const mesh::TriMesh& m, const std::string& tag, int region);
Curve reversed(Curve c);

/// Hyperbolic length of the polygonal curve (midpoint rule per edge).
double curve_length(const mesh::TriMesh& m, const Curve& c);

double flux(const ScalarField& u, const Curve& c, double H = 0.0, FluxMethod method = FluxMethod::Element);
/// Flux of grad u / W_u - grad beta / W_beta.
double difference_flux(const ScalarField& u, const ScalarField& beta, const Curve& c, double H = 0.0,
                       FluxMethod method = FluxMethod::Element);
/// Flux over the whole mesh boundary minus 2H times the mesh area. The
/// reaction flux makes this the residual sum over interior nodes, so it is
/// at solver tolerance; the element flux converges like O(h).
double stokes_residual(const ScalarField& u, double H, FluxMethod method = FluxMethod::Reaction);
/// Same for the difference of two fields (no area term).
double difference_stokes(const ScalarField& u, const ScalarField& beta, FluxMethod method = FluxMethod::Reaction);
/// max over edges of |grad u|_g / W at the edge midpoints of the curve.
double speed_bound(const ScalarField& u, const Curve& c);

struct CurveFlux {
  std::string tag;
  double length = 0.0;
  double flux_u = 0.0;
  std::optional<double> flux_beta;
  std::optional<double> diff_flux;
  /// length - |flux_u|.
  double bound_gap = 0.0;
};

struct FluxReport {
  int level = 0;
  std::vector<CurveFlux> curves;
  /// Reaction flux.
  double stokes_residual = 0.0;
  /// Element flux, the sum of the per-curve values below.
  double stokes_element = 0.0;
  /// Closed-boundary total of the difference flux, when beta is present.
  std::optional<double> difference_total;
  double sum_C_length = 0.0;
  bool bound_ok = true;
  std::string convention = kConvention;
};

/// Per-tag element fluxes over the mesh boundary.
FluxReport flux_report(const ScalarField& u, double H, const ScalarField* beta = nullptr, int level = 0);

/// Total hyperbolic length of the horocycle arcs of a family on a domain.
double horocycle_length(const domain::ScherkDomain& d, const domain::HorodiskFamily& family);

/// Sizes shrink and every disk of level n+1 sits inside the one of level n.
bool nested(const std::vector<domain::HorodiskFamily>& families);

/// Horodisk families of size size0 / 2^k, k = 0 .. levels-1.
std::vector<domain::HorodiskFamily> halving_families(const domain::ScherkDomain& d, double size0, int levels);

struct ExhaustionLevel {
  int n = 0;
  domain::HorodiskFamily family;
  /// Fields on the same mesh of P^n minus B_y, boundary tags A/B/C and "dBy".
  ScalarField u;
  ScalarField beta;
};

/// Flux reports for each level. Throws SolverError when the families are
/// not nested; the report flags arcs with |flux| > length and a
/// non-decreasing horocycle total.
std::vector<FluxReport> exhaustion_experiment(const domain::ScherkDomain& d, const std::vector<ExhaustionLevel>& levels,
                                              double H);

struct UniquenessRow {
  int n = 0;
  double sup_gap = 0.0;
  /// Reaction difference flux, so that it cancels the other arcs exactly.
  double dBy_diff_flux = 0.0;
  double sum_C_length = 0.0;
  /// u <= beta <= u + eps' within 1e-10.
  bool ordered = true;
  /// |dBy_diff_flux| <= 2 sum |C| + 1e-6.
  bool within_bound = true;
  std::size_t nodes = 0;
  double M_reached = 0.0;
};

struct UniquenessOptions {
  solver::Disk B_y{{0.0, 0.0}, 0.3};
  /// The compact annulus for sup_gap: r_By < dist(., y) <= r_By + probe_width.
  double probe_width = 0.3;
  double eps_prime = 0.05;
  mesh::RefinementSpec spec;
};

struct UniquenessTable {
  std::vector<UniquenessRow> rows;
  std::vector<FluxReport> reports;
  bool sup_gap_nonincreasing = true;
  bool flux_nonincreasing = true;
  /// Set when a level failed; the table stops before it.
  std::optional<std::string> stopped;
};

/// For each family: mesh P^n with B_y embedded, u = scherk_approx on it, and
/// beta on P^n minus B_y with data u + eps' on dBy and on the A/B arcs and u
/// on the C arcs.
UniquenessTable uniqueness_experiment(const domain::ScherkDomain& d, const std::vector<domain::HorodiskFamily>& families,
                                      const UniquenessOptions& opt, double H, const solver::SolverConfig& config);

std::string report_json(const std::vector<FluxReport>& reports);
/// Rows "level,tag,length,flux_u,flux_beta,diff_flux,bound_gap".
std::string report_csv(const std::vector<FluxReport>& reports);
/// Rows "n,sup_gap,dBy_diff_flux,sum_C_length".
std::string table_csv(const UniquenessTable& t);

}  // namespace scherklab::flux

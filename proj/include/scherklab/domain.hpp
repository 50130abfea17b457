#pragma once

// Scherk type ideal polygons, horodisk families, truncated lengths and the
// solvability conditions for the infinite-boundary Dirichlet problem.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scherklab/hypgeom.hpp"

namespace scherklab::domain {

/// Ideal polygon with vertices listed counter-clockwise. Edge i joins vertex
/// i to vertex i+1; A-edges have curvature +2H towards the interior, B-edges
/// -2H.
struct ScherkDomain {
  double H = 0.0;
  std::vector<hyp::IdealPoint> vertices;
  std::vector<hyp::ArcLabel> labels;
  /// Empty when the arcs could not be built (see validate).
  std::vector<hyp::Arc> edges;

  std::size_t size() const { return vertices.size(); }
};

/// Builds the edge arcs. Never throws for bad geometry; validate() explains.
ScherkDomain make_domain(double H, const std::vector<double>& angles, const std::vector<hyp::ArcLabel>& labels);

struct Diagnostics {
  bool valid = true;
  std::string message;
  int vertex = -1;
  int edge = -1;
};

Diagnostics validate(const ScherkDomain& d);

/// One horodisk per vertex.
struct HorodiskFamily {
  std::vector<hyp::Horodisk> disks;
  /// Largest disk size, for reports.
  double size = 0.0;
};

/// Family valid for the domain: pairwise disjoint, each edge meets only the
/// disks at its own endpoints, every edge truncates cleanly.
Diagnostics validate_family(const ScherkDomain& d, const HorodiskFamily& family);

/// Equal-size family, halving the size until it is valid for the domain.
HorodiskFamily default_horodisks(const ScherkDomain& d, double size);

/// Same family with every size multiplied by `factor`.
HorodiskFamily scaled(const HorodiskFamily& family, double factor);

struct TruncatedSums {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> per_edge;
  std::vector<hyp::Arc> truncated;
};

TruncatedSums truncated_sums(const ScherkDomain& d, const HorodiskFamily& family, double tol = 1e-10);

/// Hyperbolic area of the domain.
double domain_area(const ScherkDomain& d, double tol = 1e-10);

struct InscribedPolygon {
  std::vector<int> vertex_subset;
  std::vector<hyp::Arc> edges;
  /// Index of the domain edge that each edge coincides with, or -1 for a chord.
  std::vector<int> domain_edge;
  /// Sign of each edge's curvature with respect to its left normal.
  std::vector<int> signs;
};

struct InscribedList {
  std::vector<InscribedPolygon> polygons;
  bool complete = true;
  std::size_t candidates_examined = 0;
};

/// All inscribed 2H-polygons P != D on at least two vertices, sorted by
/// (subset size, subset, signs). `edge_budget` caps the number of candidate
/// edge assignments examined; when it is hit the list is flagged incomplete.
InscribedList enumerate_inscribed(const ScherkDomain& d, std::size_t edge_budget = 200000,
                                  int samples_per_edge = 1000);

struct PolygonCheck {
  InscribedPolygon polygon;
  double alpha = 0.0;
  double beta = 0.0;
  double perimeter = 0.0;
  double area = 0.0;
  double alpha_condition = 0.0;  // 2 alpha - l - 2H area
  double beta_condition = 0.0;   // 2 beta - l + 2H area
};

struct SolvabilityReport {
  double H = 0.0;
  double horodisk_size = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> edge_lengths;
  double area = 0.0;
  double equality_residual = 0.0;  // alpha - beta - 2H area
  std::vector<PolygonCheck> polygon_checks;
  bool polygons_complete = true;
  double tol = 1e-8;
  double margin_tol = 1e-6;
  bool verdict = false;
  /// Verdict recomputed with every horodisk halved.
  std::optional<bool> halved_verdict;
  std::vector<std::string> warnings;
};

struct CheckOptions {
  double tol = 1e-8;
  double margin_tol = 1e-6;
  double quad_tol = 1e-11;
  bool halving_check = true;
  std::size_t edge_budget = 200000;
};

SolvabilityReport check_solvability(const ScherkDomain& d, const HorodiskFamily& family,
                                    const CheckOptions& opt = {});

/// Vertex angles base + t * weights; labels and H fixed.
struct DomainFamily {
  double H = 0.2;
  std::vector<double> base_vertices;
  std::vector<double> param_weights;
  std::vector<hyp::ArcLabel> labels;
  double horodisk_size = 0.2;
  double param_lo = 0.0;
  double param_hi = 1.0;

  ScherkDomain at(double t) const;
};

struct Calibration {
  bool found = false;
  double param = 0.0;
  ScherkDomain domain;
  SolvabilityReport report;
  std::string message;
};

/// Root of the equality residual over [param_lo, param_hi]. When the root
/// fails an inequality check the interval is split and the search continues
/// on the remaining sign changes.
Calibration calibrate(const DomainFamily& family, const CheckOptions& opt = {}, int scan_points = 16);

/// Domain file: {"H", "vertices", "edge_labels", "horodisk_size"}.
struct DomainSpec {
  ScherkDomain domain;
  double horodisk_size = 0.2;
};

/// Parse errors throw std::invalid_argument with a diagnostic.
DomainSpec parse_domain(const std::string& json_text);
std::string domain_json(const ScherkDomain& d, double horodisk_size);
DomainFamily parse_family(const std::string& json_text);

hyp::ArcLabel parse_label(const std::string& s);

std::string report_json(const SolvabilityReport& r);
/// One row per inscribed polygon.
std::string report_csv(const SolvabilityReport& r);

}  // namespace scherklab::domain

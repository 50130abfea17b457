#pragma once

// Triangle meshes in disk coordinates with tagged boundaries.

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scherklab/domain.hpp"
#include "scherklab/hypgeom.hpp"

namespace scherklab::mesh {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaggedEdge {
  int a = 0;
  int b = 0;
  std::string tag;
};

struct TriMesh {
  std::vector<Complex> nodes;
  /// Counter-clockwise node triples.
  std::vector<std::array<int, 3>> triangles;
  /// Region id per triangle (0 outside every embedded circle).
  std::vector<int> region;
  /// Boundary edges, oriented with the mesh on the left.
  std::vector<TaggedEdge> boundary;
  /// Tagged interior curves (embedded circles), counter-clockwise.
  std::vector<TaggedEdge> interfaces;
  /// lambda^2 at each node.
  std::vector<double> lambda2;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::vector<char> boundary_mask() const;
  /// Nodes on boundary or interface edges carrying `tag`, sorted.
  std::vector<int> nodes_with_tag(const std::string& tag) const;
  /// Distinct boundary and interface tags, sorted.
  std::vector<std::string> tags() const;
  /// Tag of each node: first boundary tag seen, else interface tag, else "".
  std::vector<std::string> node_tags() const;
  /// Hyperbolic area (7-point rule on each triangle).
  double area() const;
};

struct RefinementSpec {
  /// Euclidean edge length target at the origin.
  double target_h = 0.1;
  /// Sizes scale like (1 - |z|^2)^(grading - 1); 2 is uniform hyperbolic size.
  double grading = 2.0;
  std::size_t max_nodes = 400000;

  double size_at(Complex z) const;
};

/// Geodesic circle embedded in a mesh, either as a hole or as a region.
struct EmbeddedCircle {
  Complex center;
  double radius = 0.1;  // hyperbolic
  std::string tag = "dBy";
  bool hole = false;
  int region = 1;
};

/// Euclidean center and radius of the geodesic circle.
std::pair<Complex, double> geodesic_circle(Complex center, double radius);

/// Mesh of the domain outside every horodisk. Boundary tags: "A<i>"/"B<i>"
/// for the truncated edge i, "C<k>" for the horocycle arc at vertex k.
TriMesh mesh_truncated_domain(const domain::ScherkDomain& d, const domain::HorodiskFamily& family,
                              const RefinementSpec& spec, std::span<const EmbeddedCircle> circles = {});

/// Geodesic disk; boundary tag "circle".
TriMesh mesh_disk(Complex center, double radius, const RefinementSpec& spec);

/// Geodesic annulus; boundary tags "inner" and "outer".
TriMesh mesh_annulus(Complex center, double r_in, double r_out, const RefinementSpec& spec);

struct SubMesh {
  TriMesh mesh;
  /// Parent node of each sub-mesh node.
  std::vector<int> node_map;
  std::vector<int> triangle_map;
};

/// Sub-mesh of the triangles selected by `keep`. New boundary edges keep the
/// parent's tag when the parent had one there, otherwise get `cut_tag`.
SubMesh restrict(const TriMesh& m, const std::function<bool(int)>& keep, const std::string& cut_tag = "cut");

/// Triangles whose three nodes lie in the closed geodesic disk.
SubMesh restrict_to_disk(const TriMesh& m, Complex center, double radius);

/// Inradius over circumradius (1/2 for an equilateral triangle).
double triangle_quality(Complex a, Complex b, Complex c);
double min_quality(const TriMesh& m);

std::string mesh_json(const TriMesh& m);
/// Rows "id,x,y,tag".
std::string nodes_csv(const TriMesh& m);

}  // namespace scherklab::mesh

#pragma once

// Hyperbolic plane kernel in the Poincare unit disk, metric lambda^2 |dz|^2
// with lambda(z) = 2 / (1 - |z|^2).

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace scherklab {

using Complex = std::complex<double>;

/// Raised for invalid geometric input (points outside the disk, degenerate arcs,
/// overlapping horodisks, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace scherklab

namespace scherklab::hyp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A point of the open unit disk.
class DiskPoint {
 public:
  DiskPoint(double x, double y);
  explicit DiskPoint(Complex z) : DiskPoint(z.real(), z.imag()) {}

  double x() const { return z_.real(); }
  double y() const { return z_.imag(); }
  Complex z() const { return z_; }

 private:
  Complex z_;
};

/// A point of the circle at infinity, stored by its angle reduced to [0, 2pi).
class IdealPoint {
 public:
  explicit IdealPoint(double theta);

  double theta() const { return theta_; }
  Complex z() const { return std::polar(1.0, theta_); }

 private:
  double theta_;
};

using Endpoint = std::variant<IdealPoint, DiskPoint>;

Complex to_complex(const Endpoint& e);
bool is_ideal(const Endpoint& e);

/// Conformal factor 2 / (1 - |z|^2) and its square.
inline double lambda(Complex z) { return 2.0 / (1.0 - std::norm(z)); }
inline double lambda2(Complex z) {
  const double l = lambda(z);
  return l * l;
}

double dist(const DiskPoint& p, const DiskPoint& q);
double dist(Complex p, Complex q);

/// Euclidean radius of the geodesic circle of hyperbolic radius r about 0.
inline double euclidean_radius(double r) { return std::tanh(0.5 * r); }

enum class ArcLabel { A, B, C, Generic };
enum class Side { Left, Right };

std::string to_string(ArcLabel label);

/// A curve of constant geodesic curvature, stored as a Euclidean circular arc
/// (or straight segment) parametrized by tau in [0, 1].
///
/// `kappa` is the signed geodesic curvature with respect to the left normal of
/// the direction of travel; it is computed from the Euclidean geometry.
struct Arc {
  Complex start;
  Complex end;
  bool start_ideal = false;
  bool end_ideal = false;
  bool straight = false;
  Complex center;   // circle center (unused when straight)
  double radius = 0.0;
  double theta0 = 0.0;  // polar angle of start about center
  double sweep = 0.0;   // signed angle swept from start to end
  double kappa = 0.0;
  ArcLabel label = ArcLabel::Generic;

  Complex point(double tau) const;
  /// d point / d tau.
  Complex derivative(double tau) const;
  /// Unit Euclidean tangent in the direction of travel.
  Complex unit_tangent(double tau) const;
  Complex midpoint() const { return point(0.5); }
  bool complete() const { return start_ideal && end_ideal; }
  bool compact() const { return !start_ideal && !end_ideal; }

  /// Parameter of a point lying on the carrier circle/line (not clamped).
  double parameter_of(Complex p) const;
  /// Sub-arc between two parameters; endpoint ideal flags are kept only when
  /// the parameter is exactly 0 or 1.
  Arc sub_arc(double tau0, double tau1) const;
  Arc reversed() const;
};

/// Circular arc with the given Euclidean data; kappa is derived.
Arc make_circle_arc(Complex center, double radius, double theta0, double sweep);
/// Straight Euclidean segment; kappa is derived.
Arc make_segment(Complex a, Complex b);

/// Unique arc from a to b with signed curvature `kappa` measured against the
/// `side` normal of the direction a -> b. For two ideal endpoints the arc is
/// the complete curve inside the disk; for interior endpoints the shorter of
/// the admissible arcs is chosen.
Arc arc_between(const Endpoint& a, const Endpoint& b, double kappa, Side side = Side::Left,
                ArcLabel label = ArcLabel::Generic);

/// Samples the arc at interior parameters and measures the signed geodesic
/// curvature by finite differences: the Euclidean curvature of the circle
/// through three nearby curve points, corrected by the conformal factor.
/// Independent of how the arc was constructed.
std::vector<double> geodesic_curvature_oracle(const Arc& arc, int n_samples);

/// Hyperbolic length of a compact arc (adaptive Gauss-Kronrod); +inf when an
/// endpoint is ideal.
double hyperbolic_length(const Arc& arc, double tol = 1e-10);

/// Disk bounded by a horocycle: Euclidean circle of diameter `size` internally
/// tangent to the unit circle at `base`.
class Horodisk {
 public:
  Horodisk(IdealPoint base, double size);

  const IdealPoint& base() const { return base_; }
  double size() const { return size_; }
  Complex center() const { return (1.0 - 0.5 * size_) * base_.z(); }
  double radius() const { return 0.5 * size_; }
  bool contains(Complex z) const;
  bool disjoint(const Horodisk& other) const;
  /// Height of the horocycle in the upper half-plane chart sending base to
  /// infinity (see to_half_plane).
  double half_plane_height() const { return (2.0 - size_) / size_; }
  /// The full horocycle as a closed circle starting and ending at base.
  Arc boundary_circle() const;

 private:
  IdealPoint base_;
  double size_;
};

/// True when the arc has a point inside or on the horodisk. An ideal endpoint
/// at the base counts as meeting it.
bool meets(const Arc& arc, const Horodisk& h);

/// Chart sending the ideal point at angle theta to infinity:
/// w = i (1 + z e^{-i theta}) / (1 - z e^{-i theta}). Horocycles at theta map
/// to horizontal lines.
Complex to_half_plane(Complex z, double theta);

struct Truncation {
  Arc arc;
  double length = 0.0;
};

/// Compact part of `arc` outside the horodisks at its two ideal endpoints.
Truncation truncate(const Arc& arc, const Horodisk& h1, const Horodisk& h2,
                    double tol = 1e-10);

/// Point where the arc leaves the horodisk based at its ideal start (or
/// enters the one at its ideal end).
Complex exit_point(const Arc& arc, const Horodisk& h, bool at_start);

/// Arc of the horocycle from p to q that avoids the base point.
Arc horocycle_arc(const Horodisk& h, Complex p, Complex q);

/// Hyperbolic length of the part of the horocycle inside the region bounded
/// by `region_boundary`, whose arcs meeting the base point determine the
/// piece. Returns 0 when fewer than two boundary arcs end at the base.
double horocycle_arc_length(const Horodisk& h, std::span<const Arc> region_boundary,
                            double tol = 1e-10);

/// Winding number of a closed chain of arcs around z (exact for circular arcs).
int winding_number(std::span<const Arc> chain, Complex z);

/// True when two arcs meet at a point that is not a shared endpoint.
bool arcs_cross(const Arc& a, const Arc& b, double tol = 1e-12);

/// Hyperbolic area of the region bounded by a closed, counter-clockwise chain
/// of arcs. Ideal vertices are handled by truncating with small horodisks and
/// adding the exact cusp areas; infinite when the arcs at a cusp are not
/// asymptotically parallel.
double area(std::span<const Arc> chain, double tol = 1e-8);

/// Area enclosed by a compact closed chain, from the primitive
/// 2 (x dy - y dx) / (1 - |z|^2) of lambda^2 dx dy.
double compact_area(std::span<const Arc> chain, double tol = 1e-10);

/// Area of the cusp between the two arcs meeting at an ideal vertex, inside
/// horodisk h. `incoming` ends at the vertex, `outgoing` starts there.
double cusp_area(const Arc& incoming, const Arc& outgoing, const Horodisk& h);

/// -Area + sum of kappa * length + sum of turning angles - 2 pi for a compact
/// counter-clockwise chain. Vanishes by Gauss-Bonnet.
double gauss_bonnet_residual(std::span<const Arc> chain, double tol = 1e-10);

/// Disk automorphism z -> e^{i phi} (z - a) / (1 - conj(a) z).
class Mobius {
 public:
  Mobius(Complex a, double phi);

  Complex operator()(Complex z) const;
  IdealPoint operator()(const IdealPoint& p) const;
  DiskPoint operator()(const DiskPoint& p) const;
  Horodisk operator()(const Horodisk& h) const;
  /// Maps 0 to c.
  static Mobius moving_origin_to(Complex c);

 private:
  Complex a_;
  Complex rot_;
};

/// Polyline samples of the arcs as CSV rows "arc_id,s,x,y".
std::string arcs_csv(std::span<const Arc> arcs, int samples_per_arc = 200);

}  // namespace scherklab::hyp

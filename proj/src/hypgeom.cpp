#include "scherklab/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace scherklab::hyp {

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

double wrap_positive(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

double integrate(const auto& f, double a, double b, double tol) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, tol, &err);
}

// Curvature with respect to the normal pointing at the circle center.
double center_curvature(Complex center, double radius) {
  return (1.0 + radius * radius - std::norm(center)) / (2.0 * radius);
}

bool inside_disk_strictly(const Arc& arc) {
  for (double tau : {0.125, 0.25, 0.5, 0.75, 0.875}) {
    if (std::abs(arc.point(tau)) >= 1.0) return false;
  }
  return true;
}

std::vector<Complex> circle_circle(Complex c1, double r1, Complex c2, double r2) {
  const double d = std::abs(c2 - c1);
  if (d == 0.0) return {};
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  double h2 = r1 * r1 - a * a;
  const double scale = std::max(r1 * r1, 1e-300);
  if (h2 < -1e-14 * scale) return {};
  h2 = std::max(h2, 0.0);
  const Complex u = (c2 - c1) / d;
  const Complex base = c1 + a * u;
  const double h = std::sqrt(h2);
  if (h == 0.0) return {base};
  const Complex off = Complex(0.0, 1.0) * u * h;
  return {base + off, base - off};
}

std::vector<Complex> line_circle(Complex p, Complex dir, Complex c, double r) {
  // |p + s dir - c|^2 = r^2
  const Complex q = p - c;
  const double A = std::norm(dir);
  const double B = 2.0 * dot(q, dir);
  const double C = std::norm(q) - r * r;
  double disc = B * B - 4.0 * A * C;
  if (disc < -1e-14 * B * B) return {};
  disc = std::max(disc, 0.0);
  const double sq = std::sqrt(disc);
  const double s1 = (-B - sq) / (2.0 * A);
  const double s2 = (-B + sq) / (2.0 * A);
  if (sq == 0.0) return {p + s1 * dir};
  return {p + s1 * dir, p + s2 * dir};
}

std::vector<Complex> line_line(Complex p1, Complex d1, Complex p2, Complex d2) {
  const double den = cross(d1, d2);
  if (den == 0.0) return {};
  const double s = cross(p2 - p1, d2) / den;
  return {p1 + s * d1};
}

std::vector<Complex> carrier_intersections(const Arc& a, const Arc& b) {
  if (a.straight && b.straight) return line_line(a.start, a.end - a.start, b.start, b.end - b.start);
  if (a.straight) return line_circle(a.start, a.end - a.start, b.center, b.radius);
  if (b.straight) return line_circle(b.start, b.end - b.start, a.center, a.radius);
  return circle_circle(a.center, a.radius, b.center, b.radius);
}

bool same_carrier(const Arc& a, const Arc& b) {
  if (a.straight != b.straight) return false;
  if (a.straight) {
    const Complex da = a.end - a.start;
    return std::abs(cross(da, b.start - a.start)) <= 1e-12 * std::abs(da) &&
           std::abs(cross(da, b.end - a.start)) <= 1e-12 * std::abs(da);
  }
  const double scale = std::max(1.0, a.radius);
  return std::abs(a.center - b.center) <= 1e-10 * scale &&
         std::abs(a.radius - b.radius) <= 1e-10 * scale;
}

}  // namespace

DiskPoint::DiskPoint(double x, double y) : z_(x, y) {
  if (!std::isfinite(x) || !std::isfinite(y) || std::norm(z_) >= 1.0) {
    throw GeometryError("point outside the open unit disk");
  }
}

IdealPoint::IdealPoint(double theta) {
  if (!std::isfinite(theta)) throw GeometryError("ideal point angle must be finite");
  theta_ = wrap_positive(theta);
  if (theta_ >= kTwoPi) theta_ = 0.0;
}

Complex to_complex(const Endpoint& e) {
  return std::visit([](const auto& p) { return p.z(); }, e);
}

bool is_ideal(const Endpoint& e) { return std::holds_alternative<IdealPoint>(e); }

double dist(Complex p, Complex q) {
  const double num = 2.0 * std::norm(p - q);
  const double den = (1.0 - std::norm(p)) * (1.0 - std::norm(q));
  // acosh(1 + x) evaluated as log1p to keep accuracy for close points
  const double x = num / den;
  return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

double dist(const DiskPoint& p, const DiskPoint& q) { return dist(p.z(), q.z()); }

std::string to_string(ArcLabel label) {
  switch (label) {
    case ArcLabel::A: return "A";
    case ArcLabel::B: return "B";
    case ArcLabel::C: return "C";
    case ArcLabel::Generic: return "generic";
  }
  return "generic";
}

Complex Arc::point(double tau) const {
  if (straight) return start + tau * (end - start);
  return center + std::polar(radius, theta0 + tau * sweep);
}

Complex Arc::derivative(double tau) const {
  if (straight) return end - start;
  return Complex(0.0, sweep) * std::polar(radius, theta0 + tau * sweep);
}

Complex Arc::unit_tangent(double tau) const {
  const Complex d = derivative(tau);
  return d / std::abs(d);
}

double Arc::parameter_of(Complex p) const {
  if (straight) {
    const Complex d = end - start;
    return dot(p - start, d) / std::norm(d);
  }
  const double ang = std::arg(p - center) - theta0;
  if (sweep > 0) return wrap_positive(ang) / sweep;
  double w = wrap_positive(-ang);
  return -w / sweep;
}

Arc Arc::sub_arc(double tau0, double tau1) const {
  Arc out = *this;
  out.start = tau0 == 0.0 ? start : point(tau0);
  out.end = tau1 == 1.0 ? end : point(tau1);
  out.start_ideal = start_ideal && tau0 == 0.0;
  out.end_ideal = end_ideal && tau1 == 1.0;
  if (!straight) {
    out.theta0 = theta0 + tau0 * sweep;
    out.sweep = (tau1 - tau0) * sweep;
  }
  if (tau1 < tau0) out.kappa = -kappa;
  return out;
}

Arc Arc::reversed() const {
  Arc out = *this;
  std::swap(out.start, out.end);
  std::swap(out.start_ideal, out.end_ideal);
  if (!straight) {
    out.theta0 = theta0 + sweep;
    out.sweep = -sweep;
  }
  out.kappa = -kappa;
  return out;
}

Arc make_circle_arc(Complex center, double radius, double theta0, double sweep) {
  if (!(radius > 0.0) || sweep == 0.0) throw GeometryError("degenerate circular arc");
  Arc arc;
  arc.center = center;
  arc.radius = radius;
  arc.theta0 = theta0;
  arc.sweep = sweep;
  arc.start = arc.point(0.0);
  arc.end = arc.point(1.0);
  arc.kappa = (sweep > 0 ? 1.0 : -1.0) * center_curvature(center, radius);
  return arc;
}

Arc make_segment(Complex a, Complex b) {
  if (a == b) throw GeometryError("degenerate segment");
  Arc arc;
  arc.straight = true;
  arc.start = a;
  arc.end = b;
  const Complex n = Complex(0.0, 1.0) * (b - a) / std::abs(b - a);
  arc.kappa = -dot(n, a);
  return arc;
}

Arc arc_between(const Endpoint& ea, const Endpoint& eb, double kappa, Side side, ArcLabel label) {
  if (!(std::abs(kappa) < 1.0)) throw GeometryError("|kappa| must be < 1");
  const Complex za = to_complex(ea);
  const Complex zb = to_complex(eb);
  if (std::abs(za - zb) < 1e-14) throw GeometryError("arc endpoints coincide");
  const double k = side == Side::Left ? kappa : -kappa;

  const Complex m = 0.5 * (za + zb);
  const double d = 0.5 * std::abs(zb - za);
  const Complex n = Complex(0.0, 1.0) * (zb - za) / (2.0 * d);
  const double s = dot(m, n);
  const double a0 = 0.5 * (1.0 + d * d - std::norm(m));

  std::vector<Arc> candidates;
  auto finish = [&](Arc arc) {
    arc.start = za;
    arc.end = zb;
    arc.start_ideal = is_ideal(ea);
    arc.end_ideal = is_ideal(eb);
    arc.label = label;
    return arc;
  };
  if (std::abs(k + s) <= 1e-12) candidates.push_back(finish(make_segment(za, zb)));

  // Circle centers c = m + t n with curvature (a0 - t s) / R towards c.
  std::vector<double> roots;
  const double qa = k * k - s * s;
  const double qb = 2.0 * a0 * s;
  const double qc = k * k * d * d - a0 * a0;
  if (std::abs(qa) < 1e-14) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    double disc = qb * qb - 4.0 * qa * qc;
    const double scale = qb * qb + std::abs(4.0 * qa * qc);
    if (std::abs(disc) <= 1e-12 * scale) disc = 0.0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
      if (q != 0.0) roots.push_back(qc / q);
      roots.push_back(q / qa);
    }
  }
  for (double t : roots) {
    if (!std::isfinite(t)) continue;
    const Complex c = m + t * n;
    const double r = std::hypot(d, t);
    const double kc = (a0 - t * s) / r;
    const double ta = std::arg(za - c);
    const double tb = std::arg(zb - c);
    const double ccw = wrap_positive(tb - ta);
    for (int dir : {+1, -1}) {
      const double signed_k = dir * kc;
      if (std::abs(signed_k - k) > 1e-7) continue;
      double sweep = dir > 0 ? ccw : ccw - kTwoPi;
      if (sweep == 0.0) continue;
      Arc arc = make_circle_arc(c, r, ta, sweep);
      candidates.push_back(finish(arc));
    }
  }
  std::optional<Arc> best;
  for (const Arc& arc : candidates) {
    if (!inside_disk_strictly(arc)) continue;
    const double size = arc.straight ? 0.0 : std::abs(arc.sweep) * arc.radius;
    const double best_size = !best ? 0.0 : (best->straight ? 0.0 : std::abs(best->sweep) * best->radius);
    if (!best || size < best_size) best = arc;
  }
  if (!best) throw GeometryError("no arc with the requested curvature joins the endpoints");
  // Keep the requested curvature exactly; the geometric value agrees to rounding.
  best->kappa = k;
  return *best;
}

std::vector<double> geodesic_curvature_oracle(const Arc& arc, int n_samples) {
  if (n_samples < 3) throw GeometryError("curvature oracle needs at least 3 samples");
  std::vector<double> out;
  out.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double tau = (i + 0.5) / n_samples;
    // step small in hyperbolic terms regardless of position
    const double speed = std::abs(arc.derivative(tau));
    const double step = std::min(1e-3, 2e-3 * (1.0 - std::norm(arc.point(tau))) / speed);
    const Complex z1 = arc.point(tau - step);
    const Complex z2 = arc.point(tau);
    const Complex z3 = arc.point(tau + step);
    const double a = std::abs(z2 - z1);
    const double b = std::abs(z3 - z2);
    const double c = std::abs(z3 - z1);
    const double ke = 2.0 * cross(z2 - z1, z3 - z2) / (a * b * c);
    const Complex tangent = (z3 - z1) / c;
    const Complex left = Complex(0.0, 1.0) * tangent;
    const double w = 1.0 - std::norm(z2);
    const Complex grad_log_lambda = 2.0 * z2 / w;
    out.push_back((ke - dot(left, grad_log_lambda)) * w / 2.0);
  }
  return out;
}

double hyperbolic_length(const Arc& arc, double tol) {
  if (!arc.compact()) return std::numeric_limits<double>::infinity();
  auto f = [&](double tau) { return lambda(arc.point(tau)) * std::abs(arc.derivative(tau)); };
  return integrate(f, 0.0, 1.0, tol);
}

Horodisk::Horodisk(IdealPoint base, double size) : base_(base), size_(size) {
  if (!(size > 0.0 && size < 1.0)) throw GeometryError("horodisk size must lie in (0, 1)");
}

bool Horodisk::contains(Complex z) const { return std::abs(z - center()) < radius(); }

bool Horodisk::disjoint(const Horodisk& other) const {
  return std::abs(center() - other.center()) > radius() + other.radius();
}

bool meets(const Arc& arc, const Horodisk& h) {
  const Complex base = h.base().z();
  if ((arc.start_ideal && std::abs(arc.start - base) < 1e-9) || (arc.end_ideal && std::abs(arc.end - base) < 1e-9)) {
    return true;
  }
  if (h.contains(arc.start) || h.contains(arc.end) || h.contains(arc.midpoint())) return true;
  const Arc circle = h.boundary_circle();
  for (Complex p : carrier_intersections(arc, circle)) {
    const double t = arc.parameter_of(p);
    if (t >= 0.0 && t <= 1.0) return true;
  }
  return false;
}

Arc Horodisk::boundary_circle() const {
  const Arc arc = make_circle_arc(center(), radius(), base_.theta(), kTwoPi);
  return arc;
}

Complex to_half_plane(Complex z, double theta) {
  const Complex r = z * std::polar(1.0, -theta);
  return Complex(0.0, 1.0) * (1.0 + r) / (1.0 - r);
}

Complex exit_point(const Arc& arc, const Horodisk& h, bool at_start) {
  const Complex base = h.base().z();
  const Complex endpoint = at_start ? arc.start : arc.end;
  if (std::abs(endpoint - base) > 1e-9) throw GeometryError("horodisk is not based at the arc endpoint");
  if (arc.straight) {
    const Complex dir = arc.end - arc.start;
    auto pts = line_circle(arc.start, dir, h.center(), h.radius());
    Complex best = base;
    for (Complex p : pts) {
      if (std::abs(p - base) > std::abs(best - base)) best = p;
    }
    if (std::abs(best - base) < 1e-14) throw GeometryError("arc tangent to horocycle");
    return best;
  }
  const Complex c1 = arc.center;
  const Complex c2 = h.center();
  const Complex u = (c2 - c1) / std::abs(c2 - c1);
  const Complex p = c1 + u * u * std::conj(base - c1);
  if (std::abs(p - base) < 1e-14) throw GeometryError("arc tangent to horocycle");
  return p;
}

Truncation truncate(const Arc& arc, const Horodisk& h1, const Horodisk& h2, double tol) {
  if (!arc.complete()) throw GeometryError("truncate expects an arc with two ideal endpoints");
  if (!h1.disjoint(h2)) throw GeometryError("horodisks overlap");
  const Complex p = exit_point(arc, h1, true);
  const Complex q = exit_point(arc, h2, false);
  const double t0 = arc.parameter_of(p);
  const double t1 = arc.parameter_of(q);
  if (!(t0 > 0.0 && t0 < t1 && t1 < 1.0)) throw GeometryError("horodisks overlap along the arc");
  Arc sub = arc.sub_arc(t0, t1);
  sub.start = p;
  sub.end = q;
  return {sub, hyperbolic_length(sub, tol)};
}

Arc horocycle_arc(const Horodisk& h, Complex p, Complex q) {
  const Complex c = h.center();
  const double tp = std::arg(p - c);
  const double tq = std::arg(q - c);
  const double ccw = wrap_positive(tq - tp);
  const double to_base = wrap_positive(std::arg(h.base().z() - c) - tp);
  const double sweep = to_base < ccw ? ccw - kTwoPi : ccw;
  Arc arc = make_circle_arc(c, h.radius(), tp, sweep);
  arc.start = p;
  arc.end = q;
  arc.label = ArcLabel::C;
  return arc;
}

double horocycle_arc_length(const Horodisk& h, std::span<const Arc> region_boundary, double tol) {
  const Complex base = h.base().z();
  const Arc* incoming = nullptr;
  const Arc* outgoing = nullptr;
  for (const Arc& arc : region_boundary) {
    if (arc.end_ideal && std::abs(arc.end - base) < 1e-9) incoming = &arc;
    if (arc.start_ideal && std::abs(arc.start - base) < 1e-9) outgoing = &arc;
  }
  if (!incoming || !outgoing) return 0.0;
  const Complex p = exit_point(*incoming, h, false);
  const Complex q = exit_point(*outgoing, h, true);
  return hyperbolic_length(horocycle_arc(h, p, q), tol);
}

int winding_number(std::span<const Arc> chain, Complex z) {
  double total = 0.0;
  for (const Arc& arc : chain) {
    double delta = std::arg((arc.end - z) / (arc.start - z));
    if (!arc.straight) {
      if (std::abs(arc.sweep) >= kTwoPi - 1e-12) {
        if (std::abs(z - arc.center) < arc.radius) delta += arc.sweep > 0 ? kTwoPi : -kTwoPi;
      } else {
        const bool in_circle = std::abs(z - arc.center) < arc.radius;
        const Complex chord = arc.end - arc.start;
        const double side_z = cross(chord, z - arc.start);
        const double side_mid = cross(chord, arc.midpoint() - arc.start);
        if (in_circle && side_z * side_mid > 0.0) delta += arc.sweep > 0 ? kTwoPi : -kTwoPi;
      }
    }
    total += delta;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool arcs_cross(const Arc& a, const Arc& b, double tol) {
  if (same_carrier(a, b)) return false;
  const auto shared = [&](Complex p) {
    for (Complex e : {a.start, a.end}) {
      for (Complex f : {b.start, b.end}) {
        if (std::abs(e - f) < 1e-9 && std::abs(p - e) < 1e-5) return true;
      }
    }
    return false;
  };
  for (Complex p : carrier_intersections(a, b)) {
    if (shared(p)) continue;
    const double ta = a.parameter_of(p);
    const double tb = b.parameter_of(p);
    if (ta >= -tol && ta <= 1.0 + tol && tb >= -tol && tb <= 1.0 + tol) return true;
  }
  return false;
}

double compact_area(std::span<const Arc> chain, double tol) {
  double total = 0.0;
  for (const Arc& arc : chain) {
    auto f = [&](double tau) {
      const Complex z = arc.point(tau);
      const Complex dz = arc.derivative(tau);
      return 2.0 * (std::conj(z) * dz).imag() / (1.0 - std::norm(z));
    };
    total += integrate(f, 0.0, 1.0, tol);
  }
  return total;
}

double cusp_area(const Arc& incoming, const Arc& outgoing, const Horodisk& h) {
  const double theta = h.base().theta();
  const Complex p = exit_point(incoming, h, false);
  const Complex q = exit_point(outgoing, h, true);
  const double tp = incoming.parameter_of(p);
  const double tq = outgoing.parameter_of(q);
  const Complex wp = to_half_plane(p, theta);
  const Complex wq = to_half_plane(q, theta);
  const Complex wp2 = to_half_plane(incoming.point(0.5 * (tp + 1.0)), theta);
  const Complex wq2 = to_half_plane(outgoing.point(0.5 * tq), theta);
  const double slope_in = (wp2.real() - wp.real()) / (wp2.imag() - wp.imag());
  const double slope_out = (wq2.real() - wq.real()) / (wq2.imag() - wq.imag());
  if (std::abs(slope_in - slope_out) > 1e-6 * (1.0 + std::abs(slope_in))) {
    return std::numeric_limits<double>::infinity();
  }
  return std::abs(wq.real() - wp.real()) / h.half_plane_height();
}

double area(std::span<const Arc> chain, double tol) {
  if (chain.empty()) return 0.0;
  const std::size_t n = chain.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (arcs_cross(chain[i], chain[j], 1e-9)) throw GeometryError("self-intersecting boundary");
    }
  }
  // Horodisks at the ideal vertices.
  std::vector<std::optional<Horodisk>> cusp(n);  // cusp[i] sits at the end of arc i
  for (std::size_t i = 0; i < n; ++i) {
    const Arc& in = chain[i];
    if (!in.end_ideal) continue;
    const Arc& out = chain[(i + 1) % n];
    if (!out.start_ideal || std::abs(out.start - in.end) > 1e-9) {
      throw GeometryError("chain is not closed at an ideal vertex");
    }
    const IdealPoint base(std::arg(in.end));
    double size = 0.25;
    for (int iter = 0; iter < 60; ++iter, size *= 0.5) {
      Horodisk h(base, size);
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (cusp[j] && !cusp[j]->disjoint(h)) ok = false;
      }
      if (!ok) continue;
      const double tin = in.parameter_of(exit_point(in, h, false));
      const double tout = out.parameter_of(exit_point(out, h, true));
      if (!(tin > 0.5 && tin < 1.0 && tout > 0.0 && tout < 0.5)) continue;
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (j == i || j == (i + 1) % n) continue;
        for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          if (h.contains(chain[j].point(tau))) ok = false;
        }
      }
      if (!ok) continue;
      cusp[i] = h;
      break;
    }
    if (!cusp[i]) throw GeometryError("could not isolate ideal vertex");
  }
  std::vector<Arc> truncated;
  double cusps = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Arc& arc = chain[i];
    const std::size_t prev = (i + n - 1) % n;
    double t0 = 0.0;
    double t1 = 1.0;
    Complex p = arc.start;
    Complex q = arc.end;
    if (arc.start_ideal) {
      p = exit_point(arc, *cusp[prev], true);
      t0 = arc.parameter_of(p);
    }
    if (arc.end_ideal) {
      q = exit_point(arc, *cusp[i], false);
      t1 = arc.parameter_of(q);
    }
    Arc sub = arc.sub_arc(t0, t1);
    sub.start = p;
    sub.end = q;
    truncated.push_back(sub);
    if (arc.end_ideal) {
      const Arc& next = chain[(i + 1) % n];
      const Complex r = exit_point(next, *cusp[i], true);
      truncated.push_back(horocycle_arc(*cusp[i], q, r));
      cusps += cusp_area(arc, next, *cusp[i]);
    }
  }
  return compact_area(truncated, tol) + cusps;
}

double gauss_bonnet_residual(std::span<const Arc> chain, double tol) {
  double curvature = 0.0;
  double turning = 0.0;
  const std::size_t n = chain.size();
  for (std::size_t i = 0; i < n; ++i) {
    curvature += chain[i].kappa * hyperbolic_length(chain[i], tol);
    const Complex t_in = chain[i].unit_tangent(1.0);
    const Complex t_out = chain[(i + 1) % n].unit_tangent(0.0);
    turning += std::arg(t_out / t_in);
  }
  return -compact_area(chain, tol) + curvature + turning - kTwoPi;
}

Mobius::Mobius(Complex a, double phi) : a_(a), rot_(std::polar(1.0, phi)) {
  if (std::norm(a) >= 1.0) throw GeometryError("Mobius parameter must lie in the disk");
}

Complex Mobius::operator()(Complex z) const { return rot_ * (z - a_) / (1.0 - std::conj(a_) * z); }

IdealPoint Mobius::operator()(const IdealPoint& p) const { return IdealPoint(std::arg((*this)(p.z()))); }

DiskPoint Mobius::operator()(const DiskPoint& p) const { return DiskPoint((*this)(p.z())); }

Horodisk Mobius::operator()(const Horodisk& h) const {
  const Complex c = h.center();
  const double r = h.radius();
  const Complex base = h.base().z();
  // three points of the horocycle, away from the base
  const Complex z1 = (*this)(c - r * base);
  const Complex z2 = (*this)(c + Complex(0.0, r) * base);
  const Complex z3 = (*this)(c - Complex(0.0, r) * base);
  const double a = std::abs(z2 - z1);
  const double b = std::abs(z3 - z2);
  const double cc = std::abs(z3 - z1);
  const double radius = a * b * cc / (2.0 * std::abs(cross(z2 - z1, z3 - z1)));
  return Horodisk((*this)(h.base()), 2.0 * radius);
}

Mobius Mobius::moving_origin_to(Complex c) { return Mobius(-c, 0.0); }

std::string arcs_csv(std::span<const Arc> arcs, int samples_per_arc) {
  std::ostringstream os;
  os.precision(17);
  os << "arc_id,s,x,y\n";
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (int k = 0; k <= samples_per_arc; ++k) {
      const double tau = static_cast<double>(k) / samples_per_arc;
      const Complex z = arcs[i].point(tau);
      os << i << ',' << tau << ',' << z.real() << ',' << z.imag() << '\n';
    }
  }
  return os.str();
}

}  // namespace scherklab::hyp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "scherklab/domain.hpp"

using namespace scherklab;
using namespace scherklab::domain;
using hyp::ArcLabel;
using hyp::kPi;

namespace {

const std::vector<ArcLabel> kABAB = {ArcLabel::A, ArcLabel::B, ArcLabel::A, ArcLabel::B};
const std::vector<ArcLabel> kHex = {ArcLabel::A, ArcLabel::B, ArcLabel::A, ArcLabel::B, ArcLabel::A, ArcLabel::B};

ScherkDomain quad(double t, double H = 0.2) { return make_domain(H, {0.0, t, kPi, kPi + t}, kABAB); }

ScherkDomain hexagon(double H = 0.1) {
  std::vector<double> angles;
  for (int i = 0; i < 6; ++i) angles.push_back(i * kPi / 3 + 0.1 * (i % 2));
  return make_domain(H, angles, kHex);
}

DomainFamily quad_family() {
  DomainFamily f;
  f.H = 0.2;
  f.base_vertices = {0.0, 0.0, kPi, kPi};
  f.param_weights = {0.0, 1.0, 0.0, 1.0};
  f.labels = kABAB;
  f.horodisk_size = 0.2;
  f.param_lo = 0.5;
  f.param_hi = 3.0;
  return f;
}

// Simpson length of the edge between the two exit points.
double oracle_truncated_length(const hyp::Arc& edge, const hyp::Horodisk& h1, const hyp::Horodisk& h2) {
  const double t0 = edge.parameter_of(hyp::exit_point(edge, h1, true));
  const double t1 = edge.parameter_of(hyp::exit_point(edge, h2, false));
  return oracle::curve_length([&](double tau) { return edge.point(tau); }, t0, t1);
}

// Gauss-Bonnet in the limit of vanishing horodisks: the turning at each ideal
// vertex tends to pi, the horocycle terms vanish, so
//   area = (n - 2) pi + 2H (alpha - beta).
double closed_form_area(const ScherkDomain& d, double alpha_minus_beta) {
  return (static_cast<double>(d.size()) - 2.0) * kPi + 2.0 * d.H * alpha_minus_beta;
}

double oracle_residual(const ScherkDomain& d, double size) {
  double amb = 0.0;
  const std::size_t n = d.size();
  for (std::size_t e = 0; e < n; ++e) {
    const double len = oracle_truncated_length(d.edges[e], hyp::Horodisk(d.vertices[e], size),
                                               hyp::Horodisk(d.vertices[(e + 1) % n], size));
    amb += d.labels[e] == ArcLabel::A ? len : -len;
  }
  return amb - 2.0 * d.H * closed_form_area(d, amb);
}

std::vector<Complex> dense(const hyp::Arc& arc, double a = 0.0, double b = 1.0, int n = 1000) {
  return oracle::polyline([&](double tau) { return arc.point(tau); }, a, b, n);
}

// Brute force over vertex subsets and curvature signs, with containment by
// ray casting against a dense polyline of the domain, tangency at the ideal
// vertices by finite differences and non-degeneracy by the shoelace area.
std::set<std::pair<std::vector<int>, std::vector<int>>> brute_force_inscribed(const ScherkDomain& d) {
  std::set<std::pair<std::vector<int>, std::vector<int>>> found;
  const int n = static_cast<int>(d.size());
  std::vector<Complex> boundary;
  for (const auto& e : d.edges) {
    auto pts = dense(e, 0.0, 1.0, 4000);
    boundary.insert(boundary.end(), pts.begin(), pts.end() - 1);
  }
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    const int m = static_cast<int>(subset.size());
    if (m < 2) continue;
    for (unsigned s = 0; s < (1u << m); ++s) {
      std::vector<int> signs;
      std::vector<hyp::Arc> edges;
      bool all_domain = true;
      bool ok = true;
      for (int k = 0; k < m && ok; ++k) {
        const int a = subset[k];
        const int b = subset[(k + 1) % m];
        const int sign = (s >> k) & 1u ? -1 : 1;
        signs.push_back(sign);
        const bool is_domain = b == (a + 1) % n && (sign > 0) == (d.labels[a] == ArcLabel::A);
        all_domain = all_domain && is_domain;
        try {
          edges.push_back(hyp::arc_between(d.vertices[a], d.vertices[b], sign * 2.0 * d.H));
        } catch (const GeometryError&) {
          ok = false;
          break;
        }
        if (!is_domain) {
          for (Complex z : dense(edges.back(), 0.01, 0.99, 1000)) {
            if (!oracle::inside_polygon(boundary, z)) {
              ok = false;
              break;
            }
          }
        }
      }
      if (!ok || all_domain) continue;
      for (int k = 0; k < m && ok; ++k) {
        const hyp::Arc& in = edges[k];
        const hyp::Arc& out = edges[(k + 1) % m];
        const double h = 1e-6;
        const Complex din = (in.point(1.0 - h) - in.point(1.0)) / std::abs(in.point(1.0 - h) - in.point(1.0));
        const Complex dout = (out.point(h) - out.point(0.0)) / std::abs(out.point(h) - out.point(0.0));
        if (std::abs(din - dout) > 1e-4) ok = false;
      }
      if (!ok) continue;
      std::vector<Complex> poly;
      for (const auto& e : edges) {
        auto pts = dense(e, 0.0, 1.0, 2000);
        poly.insert(poly.end(), pts.begin(), pts.end() - 1);
      }
      double shoelace = 0.0;
      for (std::size_t i = 0; i < poly.size(); ++i) shoelace += oracle::cross2(poly[i], poly[(i + 1) % poly.size()]);
      if (shoelace < 1e-6) continue;
      for (int i = 0; i < m && ok; ++i) {
        for (int j = i + 1; j < m && ok; ++j) {
          if (oracle::polylines_cross(dense(edges[i], 0.01, 0.99, 400), dense(edges[j], 0.01, 0.99, 400))) ok = false;
        }
      }
      if (ok) found.insert({subset, signs});
    }
  }
  return found;
}

std::set<std::pair<std::vector<int>, std::vector<int>>> as_set(const InscribedList& list) {
  std::set<std::pair<std::vector<int>, std::vector<int>>> out;
  for (const auto& p : list.polygons) out.insert({p.vertex_subset, p.signs});
  return out;
}

}  // namespace

TEST_CASE("validate: alternation, simplicity, parameter ranges") {
  CHECK(validate(quad(2.0)).valid);
  CHECK(validate(hexagon()).valid);

  const ScherkDomain aa = make_domain(0.2, {0.0, 2.0, kPi, kPi + 2.0},
                                      {ArcLabel::A, ArcLabel::A, ArcLabel::B, ArcLabel::B});
  const Diagnostics diag = validate(aa);
  CHECK_FALSE(diag.valid);
  CHECK(diag.message == "alternation violated at vertex 1");
  CHECK(diag.vertex == 1);

  const ScherkDomain crossing = make_domain(0.2, {0.0, kPi, kPi / 2, 1.5 * kPi}, kABAB);
  const Diagnostics cd = validate(crossing);
  CHECK_FALSE(cd.valid);
  CHECK(cd.message.find("boundary not simple") == 0);
  // Dense polylines of the edges confirm a crossing.
  bool oracle_cross = false;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 2; j < 4; ++j) {
      if (i == 0 && j == 3) continue;
      oracle_cross = oracle_cross || oracle::polylines_cross(dense(crossing.edges[i]), dense(crossing.edges[j]));
    }
  }
  CHECK(oracle_cross);
  // and no crossing on the valid domain
  const ScherkDomain ok = quad(2.0);
  CHECK_FALSE(oracle::polylines_cross(dense(ok.edges[0]), dense(ok.edges[2])));
  CHECK_FALSE(oracle::polylines_cross(dense(ok.edges[1]), dense(ok.edges[3])));

  CHECK_FALSE(validate(make_domain(0.6, {0.0, 2.0, kPi, kPi + 2.0}, kABAB)).valid);
  CHECK_FALSE(validate(make_domain(0.0, {0.0, 2.0, kPi, kPi + 2.0}, kABAB)).valid);
  CHECK_FALSE(validate(make_domain(0.2, {0.0, 2.0, kPi}, {ArcLabel::A, ArcLabel::B, ArcLabel::A})).valid);
  CHECK(validate(make_domain(0.2, {0.0, 2.0, 2.0, kPi + 2.0}, kABAB)).message.find("coincide") != std::string::npos);
  // clockwise listing
  CHECK_FALSE(validate(make_domain(0.2, {kPi + 2.0, kPi, 2.0, 0.0}, kABAB)).valid);
}

TEST_CASE("default_horodisks: kept when disjoint, shrunk otherwise, deterministic") {
  const ScherkDomain square = quad(kPi / 2);
  const HorodiskFamily f = default_horodisks(square, 0.3);
  CHECK(f.size == 0.3);
  CHECK(validate_family(square, f).valid);

  const ScherkDomain close = make_domain(0.2, {0.0, 0.01, kPi, kPi + 0.01}, kABAB);
  const HorodiskFamily g = default_horodisks(close, 0.3);
  CHECK(g.size < 0.3);
  CHECK(validate_family(close, g).valid);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double gap = std::abs(g.disks[i].center() - g.disks[j].center()) - g.disks[i].radius() - g.disks[j].radius();
      CHECK(gap > 0.0);
    }
  }
  const HorodiskFamily g2 = default_horodisks(close, 0.3);
  CHECK(g2.size == g.size);
  CHECK_FALSE(validate_family(close, scaled(g, 4.0)).valid);
}

TEST_CASE("truncated sums: symmetry, monotonicity, horodisk independence, Simpson lengths") {
  const ScherkDomain square = quad(kPi / 2);
  const HorodiskFamily f = default_horodisks(square, 0.2);
  const TruncatedSums s = truncated_sums(square, f);
  CHECK(s.alpha == doctest::Approx(s.beta).epsilon(1e-10));

  const ScherkDomain d = quad(2.0);
  const HorodiskFamily h = default_horodisks(d, 0.2);
  const TruncatedSums a = truncated_sums(d, h);
  const TruncatedSums b = truncated_sums(d, scaled(h, 0.5));
  CHECK(b.alpha > a.alpha);
  CHECK(b.beta > a.beta);
  CHECK(std::abs((b.alpha - b.beta) - (a.alpha - a.beta)) < 1e-3);
  for (std::size_t e = 0; e < 4; ++e) {
    const double oracle_len = oracle_truncated_length(d.edges[e], h.disks[e], h.disks[(e + 1) % 4]);
    CHECK(a.per_edge[e] == doctest::Approx(oracle_len).epsilon(1e-8));
  }
}

TEST_CASE("domain area matches the ideal Gauss-Bonnet closed form") {
  for (double t : {1.0, kPi / 2, 2.0, 2.5}) {
    const ScherkDomain d = quad(t);
    const TruncatedSums s = truncated_sums(d, default_horodisks(d, 0.2));
    CHECK(domain_area(d) == doctest::Approx(closed_form_area(d, s.alpha - s.beta)).epsilon(1e-8));
  }
  const ScherkDomain hx = hexagon();
  const TruncatedSums s = truncated_sums(hx, default_horodisks(hx, 0.2));
  CHECK(domain_area(hx) == doctest::Approx(closed_form_area(hx, s.alpha - s.beta)).epsilon(1e-8));
}

TEST_CASE("alpha, beta, lengths and area are invariant under disk isometries") {
  const ScherkDomain d = quad(2.0);
  const HorodiskFamily h = default_horodisks(d, 0.2);
  const TruncatedSums s = truncated_sums(d, h);
  const double area = domain_area(d);
  for (int trial = 0; trial < 4; ++trial) {
    const hyp::Mobius m(oracle::random_disk_point(0.5), 0.7 * trial);
    std::vector<double> angles;
    HorodiskFamily mh;
    for (std::size_t i = 0; i < 4; ++i) {
      angles.push_back(m(d.vertices[i]).theta());
      mh.disks.push_back(m(h.disks[i]));
    }
    const ScherkDomain md = make_domain(d.H, angles, d.labels);
    REQUIRE(validate(md).valid);
    const TruncatedSums ms = truncated_sums(md, mh);
    CHECK(ms.alpha == doctest::Approx(s.alpha).epsilon(1e-8));
    CHECK(ms.beta == doctest::Approx(s.beta).epsilon(1e-8));
    for (std::size_t e = 0; e < 4; ++e) CHECK(ms.per_edge[e] == doctest::Approx(s.per_edge[e]).epsilon(1e-8));
    CHECK(domain_area(md) == doctest::Approx(area).epsilon(1e-8));
  }
}

TEST_CASE("enumerate_inscribed agrees with the brute-force subset scan") {
  const ScherkDomain q = quad(2.0);
  const InscribedList ql = enumerate_inscribed(q);
  CHECK(ql.complete);
  CHECK(as_set(ql) == brute_force_inscribed(q));
  // No finite-area 2H-polygon fits on fewer than all four vertices.
  CHECK(ql.polygons.empty());

  const ScherkDomain hx = hexagon();
  const InscribedList hl = enumerate_inscribed(hx);
  CHECK(hl.complete);
  CHECK(hl.polygons.size() == 6);
  CHECK(as_set(hl) == brute_force_inscribed(hx));
  for (const auto& p : hl.polygons) {
    CHECK(p.vertex_subset.size() >= 2);
    CHECK(p.vertex_subset.size() < 6);
  }

  // Rotating the vertex labelling rotates the result.
  std::vector<double> angles;
  std::vector<ArcLabel> labels;
  for (int i = 0; i < 6; ++i) {
    angles.push_back(hx.vertices[(i + 1) % 6].theta());
    labels.push_back(hx.labels[(i + 1) % 6]);
  }
  const InscribedList rl = enumerate_inscribed(make_domain(hx.H, angles, labels));
  std::set<std::vector<int>> original;
  std::set<std::vector<int>> rotated;
  for (const auto& p : hl.polygons) original.insert(p.vertex_subset);
  for (const auto& p : rl.polygons) {
    std::vector<int> back;
    for (int v : p.vertex_subset) back.push_back((v + 1) % 6);
    std::sort(back.begin(), back.end());
    rotated.insert(back);
  }
  CHECK(original == rotated);

  const InscribedList cut = enumerate_inscribed(hx, 50);
  CHECK_FALSE(cut.complete);
}

TEST_CASE("check_solvability: equality residual, polygon rows, lopsided domain, H to 0") {
  const ScherkDomain hx = hexagon();
  const SolvabilityReport r = check_solvability(hx, default_horodisks(hx, 0.2));
  CHECK(r.polygon_checks.size() == 6);
  CHECK(r.equality_residual == doctest::Approx(oracle_residual(hx, r.horodisk_size)).epsilon(1e-7));
  for (const auto& c : r.polygon_checks) {
    CHECK(c.alpha_condition == doctest::Approx(2 * c.alpha - c.perimeter - 2 * hx.H * c.area));
    CHECK(c.beta_condition == doctest::Approx(2 * c.beta - c.perimeter + 2 * hx.H * c.area));
    CHECK(c.area > 0.0);
  }
  CHECK_FALSE(r.verdict);

  const ScherkDomain lopsided = quad(2.6);
  const SolvabilityReport lr = check_solvability(lopsided, default_horodisks(lopsided, 0.2));
  CHECK_FALSE(lr.verdict);
  CHECK(lr.equality_residual > 0.0);

  for (double H : {1e-3, 1e-5}) {
    const ScherkDomain d = quad(kPi / 2, H);
    const SolvabilityReport hr = check_solvability(d, default_horodisks(d, 0.2));
    CHECK(std::abs(hr.alpha - hr.beta) < 1e-10);
    // residual = -2H area with area = 2 pi, vanishing with H
    CHECK(hr.equality_residual == doctest::Approx(-4.0 * kPi * H).epsilon(1e-8));
  }
}

TEST_CASE("calibrate: root of the equality residual on the quadrilateral family") {
  const DomainFamily f = quad_family();
  const Calibration c = calibrate(f);
  REQUIRE(c.found);
  CHECK(std::abs(c.report.equality_residual) < 1e-8);
  CHECK(c.report.verdict);
  CHECK(c.param > kPi / 2);
  CHECK(c.param < kPi);

  // Independent bisection on the Simpson/Gauss-Bonnet residual.
  double lo = kPi / 2;
  double hi = 3.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle_residual(quad(mid), 0.2) < 0.0 ? lo : hi) = mid;
  }
  CHECK(c.param == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-7));

  CheckOptions fine;
  fine.quad_tol = 1e-12;
  const SolvabilityReport refined = check_solvability(c.domain, default_horodisks(c.domain, 0.2), fine);
  CHECK(std::abs(refined.equality_residual - c.report.equality_residual) < 1e-6);
  CHECK(refined.verdict == c.report.verdict);
  REQUIRE(c.report.halved_verdict.has_value());
  CHECK(*c.report.halved_verdict == c.report.verdict);

  // The residual is increasing across the bracket.
  double previous = -1e300;
  for (double t = 1.8; t <= 2.6; t += 0.05) {
    const ScherkDomain d = quad(t);
    const TruncatedSums s = truncated_sums(d, default_horodisks(d, 0.2));
    const double res = s.alpha - s.beta - 2 * d.H * domain_area(d);
    CHECK(res > previous);
    previous = res;
  }

  DomainFamily no_root = f;
  no_root.param_lo = 0.8;
  no_root.param_hi = 1.5;
  const Calibration nc = calibrate(no_root);
  CHECK_FALSE(nc.found);
  CHECK(nc.message.find("does not change sign") != std::string::npos);
}

TEST_CASE("domain and family files") {
  const std::string text = R"({"H": 0.2, "vertices": [0, 2.0, 3.14159, 5.14159],
                               "edge_labels": ["A","B","A","B"], "horodisk_size": 0.25})";
  const DomainSpec spec = parse_domain(text);
  CHECK(spec.horodisk_size == 0.25);
  CHECK(validate(spec.domain).valid);
  const DomainSpec again = parse_domain(domain_json(spec.domain, spec.horodisk_size));
  for (std::size_t i = 0; i < 4; ++i) CHECK(again.domain.vertices[i].theta() == spec.domain.vertices[i].theta());

  CHECK_THROWS_AS(parse_domain("{\"H\": 0.2, "), std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(R"({"H": 0.2, "vertices": [0, 1, 2, 3]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(R"({"H": "x", "vertices": [0, 1, 2, 3], "edge_labels": ["A","B","A","B"]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(R"({"H": 0.2, "vertices": [0, 1, 2, 3], "edge_labels": ["A","Q","A","B"]})"),
                  std::invalid_argument);

  const DomainFamily f = parse_family(R"({"H": 0.2, "base_vertices": [0, 0, 3.141592653589793, 3.141592653589793],
      "param_weights": [0, 1, 0, 1], "edge_labels": ["A","B","A","B"], "horodisk_size": 0.2,
      "param_range": [0.5, 3.0]})");
  CHECK(f.at(2.0).vertices[3].theta() == doctest::Approx(kPi + 2.0));
  CHECK_THROWS_AS(parse_family(R"({"H": 0.2, "base_vertices": [0], "param_weights": [0, 1],
      "edge_labels": ["A"], "param_range": [0, 1]})"), std::invalid_argument);

  const SolvabilityReport r = check_solvability(hexagon(), default_horodisks(hexagon(), 0.2));
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("vertices,alpha,beta,perimeter,area,alpha_condition,beta_condition\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(report_json(r).find("\"equality_residual\"") != std::string::npos);
}

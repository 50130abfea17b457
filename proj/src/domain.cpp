#include "scherklab/domain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>
#include "json.hpp"

namespace scherklab::domain {

using hyp::Arc;
using hyp::ArcLabel;
using hyp::Horodisk;
using hyp::IdealPoint;
using json = nlohmann::json;

namespace {

double edge_kappa(ArcLabel label, double H) { return label == ArcLabel::A ? 2.0 * H : -2.0 * H; }

Diagnostics fail(std::string message, int vertex = -1, int edge = -1) {
  return Diagnostics{false, std::move(message), vertex, edge};
}

bool tangent_at_vertex(const Arc& in, const Arc& out) {
  return std::abs(in.unit_tangent(1.0) + out.unit_tangent(0.0)) < 1e-6;
}

bool same_curve(const Arc& a, const Arc& b) {
  if (a.straight || b.straight) {
    if (!(a.straight && b.straight)) return false;
    const auto on_line = [](const Arc& l, Complex p) {
      const Complex d = l.end - l.start;
      return std::abs((std::conj(d) * (p - l.start)).imag()) <= 1e-10 * std::abs(d);
    };
    return on_line(a, b.start) && on_line(a, b.end);
  }
  return std::abs(a.center - b.center) <= 1e-10 * std::max(1.0, a.radius) &&
         std::abs(a.radius - b.radius) <= 1e-10 * std::max(1.0, a.radius);
}

}  // namespace

ScherkDomain make_domain(double H, const std::vector<double>& angles, const std::vector<ArcLabel>& labels) {
  ScherkDomain d;
  d.H = H;
  for (double a : angles) d.vertices.emplace_back(a);
  d.labels = labels;
  const std::size_t n = d.vertices.size();
  if (n < 2 || labels.size() != n || !(std::abs(2.0 * H) < 1.0)) return d;
  try {
    for (std::size_t i = 0; i < n; ++i) {
      d.edges.push_back(hyp::arc_between(d.vertices[i], d.vertices[(i + 1) % n], edge_kappa(labels[i], H),
                                         hyp::Side::Left, labels[i]));
    }
  } catch (const GeometryError&) {
    d.edges.clear();
  }
  return d;
}

Diagnostics validate(const ScherkDomain& d) {
  if (!(d.H > 0.0 && d.H < 0.5)) return fail("H must lie in (0, 1/2)");
  const std::size_t n = d.size();
  if (n < 4 || n % 2) return fail(fmt::format("need an even number (>= 4) of vertices, got {}", n));
  if (d.labels.size() != n) return fail(fmt::format("{} edge labels for {} vertices", d.labels.size(), n));
  for (std::size_t i = 0; i < n; ++i) {
    if (d.labels[i] != ArcLabel::A && d.labels[i] != ArcLabel::B) {
      return fail(fmt::format("edge {} is neither A nor B", i), -1, static_cast<int>(i));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (d.labels[(k + n - 1) % n] == d.labels[k]) {
      return fail(fmt::format("alternation violated at vertex {}", k), static_cast<int>(k));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d.vertices[i].z() - d.vertices[j].z()) < 1e-12) {
        return fail(fmt::format("vertices {} and {} coincide", i, j), static_cast<int>(j));
      }
    }
  }
  if (d.edges.size() != n) return fail("edges could not be constructed");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (hyp::arcs_cross(d.edges[i], d.edges[j], 1e-9)) {
        return fail(fmt::format("boundary not simple: edges {} and {} cross", i, j), -1, static_cast<int>(i));
      }
    }
  }
  double turn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double gap = d.vertices[(i + 1) % n].theta() - d.vertices[i].theta();
    if (gap <= 0.0) gap += hyp::kTwoPi;
    turn += gap;
  }
  if (std::abs(turn - hyp::kTwoPi) > 1e-9) return fail("boundary not simple: vertices are not counter-clockwise");
  return {};
}

Diagnostics validate_family(const ScherkDomain& d, const HorodiskFamily& family) {
  const std::size_t n = d.size();
  if (family.disks.size() != n) return fail("one horodisk per vertex required");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(family.disks[i].base().z() - d.vertices[i].z()) > 1e-12) {
      return fail(fmt::format("horodisk {} is not based at its vertex", i), static_cast<int>(i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!family.disks[i].disjoint(family.disks[j])) {
        return fail(fmt::format("horodisks {} and {} overlap", i, j), static_cast<int>(j));
      }
    }
  }
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == e || j == (e + 1) % n) continue;
      if (hyp::meets(d.edges[e], family.disks[j])) {
        return fail(fmt::format("edge {} meets the horodisk at vertex {}", e, j), static_cast<int>(j),
                    static_cast<int>(e));
      }
    }
    try {
      hyp::truncate(d.edges[e], family.disks[e], family.disks[(e + 1) % n], 1e-6);
    } catch (const GeometryError& err) {
      return fail(fmt::format("edge {}: {}", e, err.what()), -1, static_cast<int>(e));
    }
  }
  return {};
}

HorodiskFamily default_horodisks(const ScherkDomain& d, double size) {
  double s = std::min(size, 0.99);
  HorodiskFamily family;
  for (int iter = 0; iter < 80; ++iter, s *= 0.5) {
    family.disks.clear();
    for (const IdealPoint& v : d.vertices) family.disks.emplace_back(v, s);
    family.size = s;
    if (validate_family(d, family).valid) return family;
  }
  return family;
}

HorodiskFamily scaled(const HorodiskFamily& family, double factor) {
  HorodiskFamily out;
  for (const Horodisk& h : family.disks) out.disks.emplace_back(h.base(), h.size() * factor);
  out.size = family.size * factor;
  return out;
}

TruncatedSums truncated_sums(const ScherkDomain& d, const HorodiskFamily& family, double tol) {
  const std::size_t n = d.size();
  TruncatedSums out;
  for (std::size_t e = 0; e < n; ++e) {
    const hyp::Truncation t = hyp::truncate(d.edges[e], family.disks[e], family.disks[(e + 1) % n], tol);
    out.per_edge.push_back(t.length);
    out.truncated.push_back(t.arc);
    (d.labels[e] == ArcLabel::A ? out.alpha : out.beta) += t.length;
  }
  return out;
}

double domain_area(const ScherkDomain& d, double tol) { return hyp::area(d.edges, tol); }

InscribedList enumerate_inscribed(const ScherkDomain& d, std::size_t edge_budget, int samples_per_edge) {
  const int n = static_cast<int>(d.size());
  InscribedList out;
  if (n < 3 || static_cast<int>(d.edges.size()) != n || n > 30) {
    out.complete = n <= 30;
    return out;
  }

  struct Candidate {
    std::optional<Arc> arc;
    int domain_edge = -1;
    bool contained = false;
  };
  // (a, b, sign) -> candidate edge from vertex a to vertex b
  std::map<std::tuple<int, int, int>, Candidate> cache;
  auto candidate = [&](int a, int b, int sign) -> const Candidate& {
    const auto key = std::make_tuple(a, b, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Candidate c;
    const ArcLabel own = sign > 0 ? ArcLabel::A : ArcLabel::B;
    if (b == (a + 1) % n && d.labels[a] == own) {
      c.arc = d.edges[a];
      c.domain_edge = a;
      c.contained = true;
    } else {
      try {
        c.arc = hyp::arc_between(d.vertices[a], d.vertices[b], sign * 2.0 * d.H, hyp::Side::Left, ArcLabel::Generic);
        c.contained = true;
        for (int k = 0; k < samples_per_edge && c.contained; ++k) {
          const Complex z = c.arc->point((k + 0.5) / samples_per_edge);
          if (hyp::winding_number(d.edges, z) != 1) c.contained = false;
        }
        for (int e = 0; e < n && c.contained; ++e) {
          if (same_curve(*c.arc, d.edges[e]) || hyp::arcs_cross(*c.arc, d.edges[e], 1e-9)) c.contained = false;
        }
      } catch (const GeometryError&) {
        c.arc.reset();
      }
    }
    return cache.emplace(key, std::move(c)).first->second;
  };

  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask <= full && out.complete; ++mask) {
    const int m = std::popcount(mask);
    if (m < 2) continue;
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    for (unsigned signs = 0; signs < (1u << m); ++signs) {
      if (++out.candidates_examined > edge_budget) {
        out.complete = false;
        break;
      }
      InscribedPolygon p;
      p.vertex_subset = subset;
      bool ok = true;
      for (int k = 0; k < m && ok; ++k) {
        const int sign = (signs >> k) & 1u ? -1 : 1;
        const Candidate& c = candidate(subset[k], subset[(k + 1) % m], sign);
        if (!c.arc || !c.contained) {
          ok = false;
          break;
        }
        p.edges.push_back(*c.arc);
        p.domain_edge.push_back(c.domain_edge);
        p.signs.push_back(sign);
      }
      if (!ok) continue;
      if (m == n && std::all_of(p.domain_edge.begin(), p.domain_edge.end(), [](int e) { return e >= 0; })) continue;
      for (int k = 0; k < m && ok; ++k) {
        if (!tangent_at_vertex(p.edges[k], p.edges[(k + 1) % m])) ok = false;
        for (int j = k + 1; j < m && ok; ++j) {
          if (same_curve(p.edges[k], p.edges[j]) || hyp::arcs_cross(p.edges[k], p.edges[j], 1e-9)) ok = false;
        }
      }
      if (!ok) continue;
      double a = 0.0;
      try {
        a = hyp::area(p.edges, 1e-8);
      } catch (const GeometryError&) {
        continue;
      }
      if (!(std::isfinite(a) && a > 1e-9)) continue;
      out.polygons.push_back(std::move(p));
    }
  }
  std::sort(out.polygons.begin(), out.polygons.end(), [](const InscribedPolygon& x, const InscribedPolygon& y) {
    if (x.vertex_subset.size() != y.vertex_subset.size()) return x.vertex_subset.size() < y.vertex_subset.size();
    if (x.vertex_subset != y.vertex_subset) return x.vertex_subset < y.vertex_subset;
    return x.signs < y.signs;
  });
  return out;
}

SolvabilityReport check_solvability(const ScherkDomain& d, const HorodiskFamily& family, const CheckOptions& opt) {
  SolvabilityReport r;
  r.H = d.H;
  r.horodisk_size = family.size;
  r.tol = opt.tol;
  r.margin_tol = opt.margin_tol;
  const TruncatedSums sums = truncated_sums(d, family, opt.quad_tol);
  r.alpha = sums.alpha;
  r.beta = sums.beta;
  r.edge_lengths = sums.per_edge;
  r.area = domain_area(d, opt.quad_tol);
  r.equality_residual = r.alpha - r.beta - 2.0 * d.H * r.area;

  const InscribedList list = enumerate_inscribed(d, opt.edge_budget);
  r.polygons_complete = list.complete;
  if (!list.complete) r.warnings.push_back("inscribed polygon search hit the edge budget");
  const std::size_t n = d.size();
  bool inequalities = true;
  for (const InscribedPolygon& p : list.polygons) {
    PolygonCheck c;
    c.polygon = p;
    const std::size_t m = p.vertex_subset.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int a = p.vertex_subset[k];
      const int b = p.vertex_subset[(k + 1) % m];
      for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<int>(j) != a && static_cast<int>(j) != b && hyp::meets(p.edges[k], family.disks[j])) {
          r.warnings.push_back(fmt::format("chord {}->{} meets the horodisk at vertex {}", a, b, j));
        }
      }
      const double len = hyp::truncate(p.edges[k], family.disks[a], family.disks[b], opt.quad_tol).length;
      c.perimeter += len;
      if (p.domain_edge[k] >= 0) (d.labels[p.domain_edge[k]] == ArcLabel::A ? c.alpha : c.beta) += len;
    }
    c.area = hyp::area(p.edges, opt.quad_tol);
    c.alpha_condition = 2.0 * c.alpha - c.perimeter - 2.0 * d.H * c.area;
    c.beta_condition = 2.0 * c.beta - c.perimeter + 2.0 * d.H * c.area;
    if (!(c.alpha_condition < -opt.margin_tol && c.beta_condition < -opt.margin_tol)) inequalities = false;
    r.polygon_checks.push_back(std::move(c));
  }
  r.verdict = std::abs(r.equality_residual) <= opt.tol && inequalities && list.complete;

  if (opt.halving_check) {
    CheckOptions inner = opt;
    inner.halving_check = false;
    const HorodiskFamily half = scaled(family, 0.5);
    if (validate_family(d, half).valid) {
      r.halved_verdict = check_solvability(d, half, inner).verdict;
      if (*r.halved_verdict != r.verdict) r.warnings.push_back("verdict changes when the horodisks are halved");
    }
  }
  return r;
}

ScherkDomain DomainFamily::at(double t) const {
  std::vector<double> angles(base_vertices.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    angles[i] = base_vertices[i] + t * (i < param_weights.size() ? param_weights[i] : 0.0);
  }
  return make_domain(H, angles, labels);
}

Calibration calibrate(const DomainFamily& family, const CheckOptions& opt, int scan_points) {
  Calibration out;
  auto residual = [&](double t) {
    const ScherkDomain d = family.at(t);
    if (!validate(d).valid) return std::numeric_limits<double>::quiet_NaN();
    const HorodiskFamily h = default_horodisks(d, family.horodisk_size);
    const TruncatedSums s = truncated_sums(d, h, opt.quad_tol);
    return s.alpha - s.beta - 2.0 * d.H * domain_area(d, opt.quad_tol);
  };
  std::vector<double> ts(scan_points + 1);
  std::vector<double> rs(scan_points + 1);
  for (int k = 0; k <= scan_points; ++k) {
    ts[k] = family.param_lo + (family.param_hi - family.param_lo) * k / scan_points;
    rs[k] = residual(ts[k]);
  }
  bool any_bracket = false;
  for (int k = 0; k < scan_points; ++k) {
    if (!std::isfinite(rs[k]) || !std::isfinite(rs[k + 1])) continue;
    if (rs[k] == 0.0 || rs[k] * rs[k + 1] < 0.0) {
      any_bracket = true;
      double t = ts[k];
      if (rs[k] != 0.0) {
        std::uintmax_t iters = 200;
        const auto root = boost::math::tools::toms748_solve(residual, ts[k], ts[k + 1], rs[k], rs[k + 1],
                                                            boost::math::tools::eps_tolerance<double>(50), iters);
        t = 0.5 * (root.first + root.second);
      }
      const ScherkDomain d = family.at(t);
      const HorodiskFamily h = default_horodisks(d, family.horodisk_size);
      SolvabilityReport report = check_solvability(d, h, opt);
      if (report.verdict) {
        out.found = true;
        out.param = t;
        out.domain = d;
        out.report = std::move(report);
        out.message = fmt::format("root at t = {:.15g}", t);
        return out;
      }
      out.message = fmt::format("root at t = {:.15g} fails the inscribed polygon checks", t);
    }
  }
  if (!any_bracket) out.message = "equality residual does not change sign on the parameter range";
  return out;
}

ArcLabel parse_label(const std::string& s) {
  if (s == "A") return ArcLabel::A;
  if (s == "B") return ArcLabel::B;
  if (s == "C") return ArcLabel::C;
  throw std::invalid_argument(fmt::format("unknown edge label '{}'", s));
}

namespace {

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("malformed JSON: {}", e.what()));
  }
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(fmt::format("missing key '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(fmt::format("key '{}' has the wrong type", key));
  }
}

std::vector<ArcLabel> labels_from(const json& j) {
  std::vector<ArcLabel> labels;
  for (const auto& s : required<std::vector<std::string>>(j, "edge_labels")) labels.push_back(parse_label(s));
  return labels;
}

}  // namespace

DomainSpec parse_domain(const std::string& text) {
  const json j = parse_text(text);
  DomainSpec spec;
  const double H = required<double>(j, "H");
  const auto vertices = required<std::vector<double>>(j, "vertices");
  spec.domain = make_domain(H, vertices, labels_from(j));
  spec.horodisk_size = j.contains("horodisk_size") ? required<double>(j, "horodisk_size") : 0.2;
  if (!(spec.horodisk_size > 0.0 && spec.horodisk_size < 1.0)) {
    throw std::invalid_argument("horodisk_size must lie in (0, 1)");
  }
  return spec;
}

std::string domain_json(const ScherkDomain& d, double horodisk_size) {
  json j;
  j["H"] = d.H;
  std::vector<double> angles;
  std::vector<std::string> labels;
  for (const IdealPoint& v : d.vertices) angles.push_back(v.theta());
  for (ArcLabel l : d.labels) labels.push_back(hyp::to_string(l));
  j["vertices"] = angles;
  j["edge_labels"] = labels;
  j["horodisk_size"] = horodisk_size;
  return j.dump(2);
}

DomainFamily parse_family(const std::string& text) {
  const json j = parse_text(text);
  DomainFamily f;
  f.H = required<double>(j, "H");
  f.base_vertices = required<std::vector<double>>(j, "base_vertices");
  f.param_weights = required<std::vector<double>>(j, "param_weights");
  f.labels = labels_from(j);
  if (j.contains("horodisk_size")) f.horodisk_size = required<double>(j, "horodisk_size");
  const auto range = required<std::vector<double>>(j, "param_range");
  if (range.size() != 2 || !(range[0] < range[1])) throw std::invalid_argument("param_range must be [lo, hi] with lo < hi");
  f.param_lo = range[0];
  f.param_hi = range[1];
  if (f.param_weights.size() != f.base_vertices.size() || f.labels.size() != f.base_vertices.size()) {
    throw std::invalid_argument("base_vertices, param_weights and edge_labels must have equal length");
  }
  if (!(f.H > 0.0 && f.H < 0.5)) throw std::invalid_argument("H must lie in (0, 1/2)");
  return f;
}

std::string report_json(const SolvabilityReport& r) {
  json j;
  j["H"] = r.H;
  j["horodisk_size"] = r.horodisk_size;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["edge_lengths"] = r.edge_lengths;
  j["area"] = r.area;
  j["equality_residual"] = r.equality_residual;
  j["inequality_area_convention"] = "area of the inscribed polygon P";
  j["tol"] = r.tol;
  j["margin_tol"] = r.margin_tol;
  j["polygons_complete"] = r.polygons_complete;
  json rows = json::array();
  for (const PolygonCheck& c : r.polygon_checks) {
    rows.push_back({{"vertices", c.polygon.vertex_subset},
                    {"domain_edges", c.polygon.domain_edge},
                    {"signs", c.polygon.signs},
                    {"alpha", c.alpha},
                    {"beta", c.beta},
                    {"perimeter", c.perimeter},
                    {"area", c.area},
                    {"alpha_condition", c.alpha_condition},
                    {"beta_condition", c.beta_condition}});
  }
  j["polygon_checks"] = rows;
  j["verdict"] = r.verdict;
  if (r.halved_verdict) j["halved_verdict"] = *r.halved_verdict;
  j["warnings"] = r.warnings;
  return j.dump(2);
}

std::string report_csv(const SolvabilityReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "vertices,alpha,beta,perimeter,area,alpha_condition,beta_condition\n";
  for (const PolygonCheck& c : r.polygon_checks) {
    std::string v;
    for (int i : c.polygon.vertex_subset) v += (v.empty() ? "" : " ") + std::to_string(i);
    os << v << ',' << c.alpha << ',' << c.beta << ',' << c.perimeter << ',' << c.area << ',' << c.alpha_condition
       << ',' << c.beta_condition << '\n';
  }
  return os.str();
}

}  // namespace scherklab::domain

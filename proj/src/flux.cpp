#include "scherklab/flux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace scherklab::flux {

using solver::SolverError;

namespace {

using DirectedEdges = std::map<std::pair<int, int>, int>;

// Directed edge a->b to the triangle having it in counter-clockwise order.
DirectedEdges directed_edges(const mesh::TriMesh& m) {
  DirectedEdges out;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    for (int i = 0; i < 3; ++i) out[{tri[i], tri[(i + 1) % 3]}] = static_cast<int>(t);
  }
  return out;
}

Eigen::Vector2d element_gradient(const mesh::TriMesh& m, int t, const std::vector<double>& u) {
  const auto& tri = m.triangles[t];
  const Complex p0 = m.nodes[tri[0]], p1 = m.nodes[tri[1]], p2 = m.nodes[tri[2]];
  const double twice = (p1 - p0).real() * (p2 - p0).imag() - (p1 - p0).imag() * (p2 - p0).real();
  const std::array<Complex, 3> p = {p0, p1, p2};
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Complex a = p[(i + 1) % 3], b = p[(i + 2) % 3];
    g += u[tri[i]] * Eigen::Vector2d(a.imag() - b.imag(), b.real() - a.real()) / twice;
  }
  return g;
}

// grad u / W . n |e| on one edge, W with lambda at the edge midpoint.
double edge_flux(const mesh::TriMesh& m, const CurveEdge& e, const std::vector<double>& u) {
  const Complex a = m.nodes[e.a], b = m.nodes[e.b];
  const Eigen::Vector2d n(b.imag() - a.imag(), a.real() - b.real());  // right normal times |e|
  const Eigen::Vector2d g = element_gradient(m, e.triangle, u);
  const double l2 = hyp::lambda2(0.5 * (a + b));
  const double W = std::sqrt(1.0 + g.squaredNorm() / l2);
  return g.dot(n) / W;
}

void check_field(const ScalarField& u) {
  if (!u.mesh) throw SolverError("field has no mesh");
  if (u.values.size() != u.mesh->nodes.size()) throw SolverError("field size does not match its mesh");
}

void check_curve(const mesh::TriMesh& m, const Curve& c) {
  for (const auto& e : c.edges) {
    if (e.triangle < 0 || e.triangle >= static_cast<int>(m.triangles.size())) {
      throw SolverError(fmt::format("curve '{}' does not belong to this mesh", c.tag));
    }
  }
}

// Node weights of the chain: 1 inside, 1/2 at the ends of an open chain.
std::map<int, double> chain_weights(const Curve& c) {
  std::map<int, int> count;
  for (const auto& e : c.edges) {
    count[e.a]++;
    count[e.b]++;
  }
  std::map<int, double> w;
  for (const auto& [node, k] : count) w[node] = k >= 2 ? 1.0 : 0.5;
  return w;
}

bool is_boundary_curve(const mesh::TriMesh& m, const Curve& c) {
  std::set<std::pair<int, int>> bd;
  for (const auto& e : m.boundary) bd.insert({e.a, e.b});
  return std::all_of(c.edges.begin(), c.edges.end(), [&](const CurveEdge& e) { return bd.count({e.a, e.b}) > 0; });
}

double reaction_sum(const ScalarField& u, const ScalarField* beta, const Curve& c, double H) {
  if (!is_boundary_curve(*u.mesh, c)) throw SolverError("reaction flux needs a curve on the mesh boundary");
  const ScalarField r = solver::residual(u, H);
  std::vector<double> rb;
  if (beta) rb = solver::residual(*beta, H).values;
  double s = 0.0;
  for (const auto& [node, w] : chain_weights(c)) s -= w * (r[node] - (beta ? rb[node] : 0.0));
  return s;
}

}  // namespace

Curve boundary_curve(const mesh::TriMesh& m, const std::vector<std::string>& tags) {
  const DirectedEdges de = directed_edges(m);
  Curve c;
  for (std::size_t i = 0; i < tags.size(); ++i) c.tag += (i ? "+" : "") + tags[i];
  for (const auto& e : m.boundary) {
    if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
    const auto it = de.find({e.a, e.b});
    if (it == de.end()) throw SolverError("boundary edge without a triangle on its left");
    c.edges.push_back({e.a, e.b, it->second});
  }
  if (c.edges.empty()) throw SolverError(fmt::format("no boundary edges tagged '{}'", c.tag));
  return c;
}

Curve interface_curve(const mesh::TriMesh& m, const std::string& tag, int region) {
  const DirectedEdges de = directed_edges(m);
  Curve c;
  c.tag = tag;
  for (const auto& e : m.interfaces) {
    if (e.tag != tag) continue;
    for (const auto& [a, b] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      const auto it = de.find({a, b});
      if (it != de.end() && m.region[it->second] == region) c.edges.push_back({a, b, it->second});
    }
  }
  if (c.edges.empty()) throw SolverError(fmt::format("no interface edges tagged '{}' next to region {}", tag, region));
  return c;
}

Curve reversed(Curve c) {
  c.sign = -c.sign;
  return c;
}

double curve_length(const mesh::TriMesh& m, const Curve& c) {
  double s = 0.0;
  for (const auto& e : c.edges) {
    const Complex a = m.nodes[e.a], b = m.nodes[e.b];
    s += std::sqrt(hyp::lambda2(0.5 * (a + b))) * std::abs(b - a);
  }
  return s;
}

double flux(const ScalarField& u, const Curve& c, double H, FluxMethod method) {
  check_field(u);
  check_curve(*u.mesh, c);
  if (method == FluxMethod::Reaction) return c.sign * reaction_sum(u, nullptr, c, H);
  double s = 0.0;
  for (const auto& e : c.edges) s += edge_flux(*u.mesh, e, u.values);
  return c.sign * s;
}

double difference_flux(const ScalarField& u, const ScalarField& beta, const Curve& c, double H, FluxMethod method) {
  check_field(u);
  check_field(beta);
  if (u.mesh != beta.mesh) throw SolverError("fields live on different meshes");
  check_curve(*u.mesh, c);
  if (method == FluxMethod::Reaction) return c.sign * reaction_sum(u, &beta, c, H);
  double s = 0.0;
  for (const auto& e : c.edges) s += edge_flux(*u.mesh, e, u.values) - edge_flux(*u.mesh, e, beta.values);
  return c.sign * s;
}

double stokes_residual(const ScalarField& u, double H, FluxMethod method) {
  check_field(u);
  std::vector<std::string> bd;
  for (const auto& e : u.mesh->boundary) bd.push_back(e.tag);
  std::sort(bd.begin(), bd.end());
  bd.erase(std::unique(bd.begin(), bd.end()), bd.end());
  if (method == FluxMethod::Reaction) {
    // Sum of -R_i over boundary nodes; the load sums to the mesh area.
    const ScalarField r = solver::residual(u, H);
    const std::vector<char> mask = u.mesh->boundary_mask();
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (mask[i]) s -= r[i];
    }
    return s - 2.0 * H * u.mesh->area();
  }
  return flux(u, boundary_curve(*u.mesh, bd), H) - 2.0 * H * u.mesh->area();
}

double difference_stokes(const ScalarField& u, const ScalarField& beta, FluxMethod method) {
  check_field(u);
  std::vector<std::string> bd;
  for (const auto& e : u.mesh->boundary) bd.push_back(e.tag);
  std::sort(bd.begin(), bd.end());
  bd.erase(std::unique(bd.begin(), bd.end()), bd.end());
  return difference_flux(u, beta, boundary_curve(*u.mesh, bd), 0.0, method);
}

double speed_bound(const ScalarField& u, const Curve& c) {
  check_field(u);
  check_curve(*u.mesh, c);
  double best = 0.0;
  for (const auto& e : c.edges) {
    const Eigen::Vector2d g = element_gradient(*u.mesh, e.triangle, u.values);
    const double s = g.squaredNorm() / hyp::lambda2(0.5 * (u.mesh->nodes[e.a] + u.mesh->nodes[e.b]));
    best = std::max(best, std::sqrt(s / (1.0 + s)));
  }
  return best;
}

FluxReport flux_report(const ScalarField& u, double H, const ScalarField* beta, int level) {
  check_field(u);
  if (beta && beta->mesh != u.mesh) throw SolverError("fields live on different meshes");
  FluxReport rep;
  rep.level = level;
  std::vector<std::string> bd;
  for (const auto& e : u.mesh->boundary) bd.push_back(e.tag);
  std::sort(bd.begin(), bd.end());
  bd.erase(std::unique(bd.begin(), bd.end()), bd.end());
  for (const auto& tag : bd) {
    const Curve c = boundary_curve(*u.mesh, {tag});
    CurveFlux cf;
    cf.tag = tag;
    cf.length = curve_length(*u.mesh, c);
    cf.flux_u = flux(u, c, H);
    cf.bound_gap = cf.length - std::abs(cf.flux_u);
    if (cf.bound_gap < -1e-8) rep.bound_ok = false;
    if (beta) {
      cf.flux_beta = flux(*beta, c, H);
      cf.diff_flux = difference_flux(u, *beta, c, H);
      if (cf.length - std::abs(*cf.flux_beta) < -1e-8) rep.bound_ok = false;
    }
    if (!tag.empty() && tag[0] == 'C') rep.sum_C_length += cf.length;
    rep.curves.push_back(cf);
  }
  rep.stokes_residual = stokes_residual(u, H);
  rep.stokes_element = stokes_residual(u, H, FluxMethod::Element);
  if (beta) rep.difference_total = difference_stokes(u, *beta);
  return rep;
}

double horocycle_length(const domain::ScherkDomain& d, const domain::HorodiskFamily& family) {
  if (family.disks.size() != d.size()) throw SolverError("family does not match the domain");
  double s = 0.0;
  for (const auto& h : family.disks) s += hyp::horocycle_arc_length(h, d.edges);
  return s;
}

bool nested(const std::vector<domain::HorodiskFamily>& families) {
  for (std::size_t n = 1; n < families.size(); ++n) {
    const auto& a = families[n - 1].disks;
    const auto& b = families[n].disks;
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(std::remainder(a[k].base().theta() - b[k].base().theta(), 2.0 * M_PI)) > 1e-12) return false;
      if (!(b[k].size() < a[k].size())) return false;
    }
  }
  return true;
}

std::vector<domain::HorodiskFamily> halving_families(const domain::ScherkDomain& d, double size0, int levels) {
  if (levels < 1) throw SolverError("need at least one level");
  const domain::HorodiskFamily base = domain::default_horodisks(d, size0);
  std::vector<domain::HorodiskFamily> out;
  for (int k = 0; k < levels; ++k) out.push_back(domain::scaled(base, std::ldexp(1.0, -k)));
  return out;
}

std::vector<FluxReport> exhaustion_experiment(const domain::ScherkDomain& d, const std::vector<ExhaustionLevel>& levels,
                                              double H) {
  std::vector<domain::HorodiskFamily> fams;
  for (const auto& l : levels) fams.push_back(l.family);
  if (!nested(fams)) throw SolverError("horodisk families are not nested");
  std::vector<FluxReport> out;
  for (const auto& l : levels) {
    FluxReport rep = flux_report(l.u, H, &l.beta, l.n);
    rep.sum_C_length = horocycle_length(d, l.family);
    if (!out.empty() && !(rep.sum_C_length < out.back().sum_C_length)) {
      throw SolverError("horocycle lengths do not decrease along the exhaustion");
    }
    out.push_back(rep);
  }
  return out;
}

UniquenessTable uniqueness_experiment(const domain::ScherkDomain& d, const std::vector<domain::HorodiskFamily>& families,
                                      const UniquenessOptions& opt, double H, const solver::SolverConfig& config) {
  if (!(opt.eps_prime > 0.0)) throw SolverError("eps' must be positive");
  if (!(opt.probe_width > 0.0)) throw SolverError("probe width must be positive");
  if (!nested(families)) throw SolverError("horodisk families are not nested");
  UniquenessTable table;
  std::vector<ExhaustionLevel> levels;
  for (std::size_t n = 0; n < families.size(); ++n) {
    const mesh::EmbeddedCircle circle{opt.B_y.center, opt.B_y.radius, "dBy", false, 1};
    auto full = std::make_shared<mesh::TriMesh>(
        mesh::mesh_truncated_domain(d, families[n], opt.spec, std::span<const mesh::EmbeddedCircle>(&circle, 1)));
    const solver::ScherkResult sr = solver::scherk_approx(full, d, H, config);
    if (!sr.reached_cap) {
      table.stopped = fmt::format("level {}: capped problem stopped at M = {}", n + 1, sr.M_reached);
      break;
    }
    const mesh::SubMesh sub = mesh::restrict(*full, [&](int t) { return full->region[t] == 0; });
    auto outer = std::make_shared<const mesh::TriMesh>(sub.mesh);
    ScalarField u(outer, 0.0);
    for (std::size_t i = 0; i < sub.node_map.size(); ++i) u[i] = sr.field[sub.node_map[i]];

    const std::vector<char> fixed = outer->boundary_mask();
    const std::vector<std::string> tags = outer->node_tags();
    ScalarField start = shift(u, opt.eps_prime);
    for (std::size_t i = 0; i < start.size(); ++i) {
      if (fixed[i] && !tags[i].empty() && tags[i][0] == 'C') start[i] = u[i];
    }
    const solver::Solution sol = solver::solve_fixed(start, fixed, H, config);
    if (!sol.report.converged) {
      table.stopped = fmt::format("level {}: Newton failed for beta", n + 1);
      break;
    }
    const ScalarField& beta = sol.field;

    UniquenessRow row;
    row.n = static_cast<int>(n) + 1;
    row.nodes = outer->node_count();
    row.M_reached = sr.M_reached;
    row.sum_C_length = horocycle_length(d, families[n]);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double g = beta[i] - u[i];
      if (g < -1e-8 || g > opt.eps_prime + 1e-8) row.ordered = false;
      const double r = hyp::dist(outer->nodes[i], opt.B_y.center);
      if (r <= opt.B_y.radius + opt.probe_width) row.sup_gap = std::max(row.sup_gap, std::abs(opt.eps_prime - g));
    }
    row.dBy_diff_flux = difference_flux(u, beta, boundary_curve(*outer, {"dBy"}), H, FluxMethod::Reaction);
    row.within_bound = std::abs(row.dBy_diff_flux) <= 2.0 * row.sum_C_length + 1e-6;
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      if (row.sup_gap > prev.sup_gap) table.sup_gap_nonincreasing = false;
      if (std::abs(row.dBy_diff_flux) > std::abs(prev.dBy_diff_flux)) table.flux_nonincreasing = false;
    }
    table.rows.push_back(row);
    levels.push_back({row.n, families[n], u, beta});
  }
  if (!levels.empty()) table.reports = exhaustion_experiment(d, levels, H);
  return table;
}

std::string report_json(const std::vector<FluxReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["level"] = r.level;
    j["convention"] = r.convention;
    j["stokes_residual"] = r.stokes_residual;
    j["stokes_element"] = r.stokes_element;
    if (r.difference_total) j["difference_total"] = *r.difference_total;
    j["sum_C_length"] = r.sum_C_length;
    j["bound_ok"] = r.bound_ok;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : r.curves) {
      nlohmann::json jc = {{"tag", c.tag}, {"length", c.length}, {"flux_u", c.flux_u}, {"bound_gap", c.bound_gap}};
      if (c.flux_beta) jc["flux_beta"] = *c.flux_beta;
      if (c.diff_flux) jc["diff_flux"] = *c.diff_flux;
      cs.push_back(jc);
    }
    j["curves"] = cs;
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::string report_csv(const std::vector<FluxReport>& reports) {
  std::ostringstream os;
  os << "level,tag,length,flux_u,flux_beta,diff_flux,bound_gap\n";
  for (const auto& r : reports) {
    for (const auto& c : r.curves) {
      os << fmt::format("{},{},{:.17g},{:.17g},{},{},{:.17g}\n", r.level, c.tag, c.length, c.flux_u,
                        c.flux_beta ? fmt::format("{:.17g}", *c.flux_beta) : "",
                        c.diff_flux ? fmt::format("{:.17g}", *c.diff_flux) : "", c.bound_gap);
    }
  }
  return os.str();
}

std::string table_csv(const UniquenessTable& t) {
  std::ostringstream os;
  os << "n,sup_gap,dBy_diff_flux,sum_C_length\n";
  for (const auto& r : t.rows) {
    os << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.n, r.sup_gap, r.dBy_diff_flux, r.sum_C_length);
  }
  return os.str();
}

}  // namespace scherklab::flux

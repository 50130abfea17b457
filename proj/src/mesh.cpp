#include "scherklab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "cdt.hpp"
#include "quadrature.hpp"

namespace scherklab::mesh {

using hyp::Arc;

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

TriMesh build(const detail::Input& in) {
  const detail::Output out = detail::triangulate(in);
  TriMesh m;
  m.nodes = out.nodes;
  m.triangles = out.triangles;
  m.region = out.region;
  for (const auto& e : out.boundary) m.boundary.push_back({e.a, e.b, in.pieces[e.piece].tag});
  for (const auto& e : out.interfaces) m.interfaces.push_back({e.a, e.b, in.pieces[e.piece].tag});
  for (Complex z : m.nodes) {
    if (std::abs(z) >= 1.0 - 1e-9) throw MeshError("mesh node too close to the ideal boundary");
    m.lambda2.push_back(hyp::lambda2(z));
  }
  return m;
}

Arc full_circle(Complex center, double radius) { return hyp::make_circle_arc(center, radius, 0.0, hyp::kTwoPi); }

}  // namespace

double RefinementSpec::size_at(Complex z) const {
  return target_h * std::pow(std::max(1.0 - std::norm(z), 1e-12), grading - 1.0);
}

std::pair<Complex, double> geodesic_circle(Complex center, double radius) {
  const double rho = std::tanh(0.5 * radius);
  const double a = std::abs(center);
  if (a < 1e-15) return {Complex(0.0, 0.0), rho};
  const Complex u = center / a;
  const double p1 = (a + rho) / (1.0 + a * rho);
  const double p2 = (a - rho) / (1.0 - a * rho);
  return {u * (0.5 * (p1 + p2)), 0.5 * (p1 - p2)};
}

std::vector<char> TriMesh::boundary_mask() const {
  std::vector<char> mask(nodes.size(), 0);
  for (const auto& e : boundary) mask[e.a] = mask[e.b] = 1;
  return mask;
}

std::vector<int> TriMesh::nodes_with_tag(const std::string& tag) const {
  std::set<int> ids;
  for (const auto* list : {&boundary, &interfaces}) {
    for (const auto& e : *list) {
      if (e.tag == tag) {
        ids.insert(e.a);
        ids.insert(e.b);
      }
    }
  }
  return {ids.begin(), ids.end()};
}

std::vector<std::string> TriMesh::tags() const {
  std::set<std::string> t;
  for (const auto& e : boundary) t.insert(e.tag);
  for (const auto& e : interfaces) t.insert(e.tag);
  return {t.begin(), t.end()};
}

std::vector<std::string> TriMesh::node_tags() const {
  std::vector<std::string> out(nodes.size());
  for (const auto* list : {&boundary, &interfaces}) {
    for (const auto& e : *list) {
      if (out[e.a].empty()) out[e.a] = e.tag;
      if (out[e.b].empty()) out[e.b] = e.tag;
    }
  }
  return out;
}

double TriMesh::area() const {
  double total = 0.0;
  for (const auto& t : triangles) {
    const Complex a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
    const double euclid = 0.5 * std::abs(((b - a) * std::conj(c - a)).imag());
    double s = 0.0;
    for (const auto& q : scherklab::detail::rule7()) s += q.w * hyp::lambda2(q.l1 * a + q.l2 * b + q.l3 * c);
    total += euclid * s;
  }
  return total;
}

TriMesh mesh_truncated_domain(const domain::ScherkDomain& d, const domain::HorodiskFamily& family,
                              const RefinementSpec& spec, std::span<const EmbeddedCircle> circles) {
  const domain::Diagnostics diag = domain::validate(d);
  if (!diag.valid) throw MeshError("invalid domain: " + diag.message);
  const domain::Diagnostics fd = domain::validate_family(d, family);
  if (!fd.valid) throw MeshError("invalid horodisk family: " + fd.message);
  const std::size_t n = d.size();
  detail::Input in;
  in.size = [&spec](Complex z) { return spec.size_at(z); };
  in.max_nodes = spec.max_nodes;
  in.loops.push_back({true, 0});
  std::vector<Arc> chain;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const hyp::Truncation t = hyp::truncate(d.edges[i], family.disks[i], family.disks[j], 1e-8);
    in.pieces.push_back({t.arc, fmt::format("{}{}", hyp::to_string(d.labels[i]), i), 0});
    const Complex q = hyp::exit_point(d.edges[j], family.disks[j], true);
    Arc c = hyp::horocycle_arc(family.disks[j], t.arc.end, q);
    in.pieces.push_back({c, fmt::format("C{}", j), 0});
    chain.push_back(t.arc);
    chain.push_back(c);
  }
  int loop = 1;
  for (const EmbeddedCircle& circle : circles) {
    const auto [center, radius] = geodesic_circle(circle.center, circle.radius);
    const Arc arc = full_circle(center, radius);
    for (int k = 0; k < 64; ++k) {
      if (hyp::winding_number(chain, arc.point(k / 64.0)) != 1) {
        throw MeshError(fmt::format("embedded circle '{}' leaves the truncated domain", circle.tag));
      }
    }
    in.loops.push_back({circle.hole, circle.region});
    in.pieces.push_back({arc, circle.tag, loop++});
  }
  return build(in);
}

TriMesh mesh_disk(Complex center, double radius, const RefinementSpec& spec) {
  if (!(radius > 0.0)) throw MeshError("disk radius must be positive");
  const auto [c, r] = geodesic_circle(center, radius);
  if (std::abs(c) + r >= 1.0 - 1e-6) throw MeshError("disk reaches the ideal boundary");
  detail::Input in;
  in.size = [&spec](Complex z) { return spec.size_at(z); };
  in.max_nodes = spec.max_nodes;
  in.loops.push_back({true, 0});
  in.pieces.push_back({full_circle(c, r), "circle", 0});
  return build(in);
}

TriMesh mesh_annulus(Complex center, double r_in, double r_out, const RefinementSpec& spec) {
  if (!(r_in > 0.0 && r_in < r_out)) throw MeshError("annulus needs 0 < r_in < r_out");
  const auto [ci, ri] = geodesic_circle(center, r_in);
  const auto [co, ro] = geodesic_circle(center, r_out);
  if (std::abs(co) + ro >= 1.0 - 1e-6) throw MeshError("annulus reaches the ideal boundary");
  detail::Input in;
  in.size = [&spec](Complex z) { return spec.size_at(z); };
  in.max_nodes = spec.max_nodes;
  in.loops.push_back({true, 0});
  in.loops.push_back({true, 0});
  in.pieces.push_back({full_circle(co, ro), "outer", 0});
  in.pieces.push_back({full_circle(ci, ri), "inner", 1});
  return build(in);
}

SubMesh restrict(const TriMesh& m, const std::function<bool(int)>& keep, const std::string& cut_tag) {
  SubMesh sub;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (keep(static_cast<int>(t))) sub.triangle_map.push_back(static_cast<int>(t));
  }
  if (sub.triangle_map.empty()) throw MeshError("restriction selects no triangles");

  std::map<std::uint64_t, std::vector<int>> edge_tris;
  for (std::size_t k = 0; k < sub.triangle_map.size(); ++k) {
    const auto& t = m.triangles[sub.triangle_map[k]];
    for (int i = 0; i < 3; ++i) edge_tris[edge_key(t[i], t[(i + 1) % 3])].push_back(static_cast<int>(k));
  }
  // connectivity through shared edges
  std::vector<std::vector<int>> adj(sub.triangle_map.size());
  for (const auto& [key, ts] : edge_tris) {
    if (ts.size() == 2) {
      adj[ts[0]].push_back(ts[1]);
      adj[ts[1]].push_back(ts[0]);
    }
  }
  std::vector<char> seen(sub.triangle_map.size(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int o : adj[t]) {
      if (!seen[o]) {
        seen[o] = 1;
        ++reached;
        stack.push_back(o);
      }
    }
  }
  if (reached != sub.triangle_map.size()) throw MeshError("restriction selects a disconnected set of triangles");

  std::vector<int> local(m.nodes.size(), -1);
  for (int t : sub.triangle_map) {
    for (int g : m.triangles[t]) local[g] = 0;
  }
  for (std::size_t g = 0; g < m.nodes.size(); ++g) {
    if (local[g] < 0) continue;
    local[g] = static_cast<int>(sub.node_map.size());
    sub.node_map.push_back(static_cast<int>(g));
    sub.mesh.nodes.push_back(m.nodes[g]);
    sub.mesh.lambda2.push_back(m.lambda2[g]);
  }
  for (int t : sub.triangle_map) {
    const auto& tri = m.triangles[t];
    sub.mesh.triangles.push_back({local[tri[0]], local[tri[1]], local[tri[2]]});
    sub.mesh.region.push_back(m.region[t]);
  }
  std::map<std::uint64_t, std::string> parent_tags;
  for (const auto& e : m.boundary) parent_tags[edge_key(e.a, e.b)] = e.tag;
  for (const auto& e : m.interfaces) parent_tags[edge_key(e.a, e.b)] = e.tag;
  for (std::size_t k = 0; k < sub.triangle_map.size(); ++k) {
    const auto& t = m.triangles[sub.triangle_map[k]];
    for (int i = 0; i < 3; ++i) {
      const int a = t[i];
      const int b = t[(i + 1) % 3];
      if (edge_tris[edge_key(a, b)].size() != 1) continue;
      auto it = parent_tags.find(edge_key(a, b));
      sub.mesh.boundary.push_back({local[a], local[b], it == parent_tags.end() ? cut_tag : it->second});
    }
  }
  for (const auto& e : m.interfaces) {
    auto it = edge_tris.find(edge_key(e.a, e.b));
    if (it != edge_tris.end() && it->second.size() == 2) sub.mesh.interfaces.push_back({local[e.a], local[e.b], e.tag});
  }
  return sub;
}

SubMesh restrict_to_disk(const TriMesh& m, Complex center, double radius) {
  std::vector<char> in(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) in[i] = hyp::dist(m.nodes[i], center) <= radius * (1.0 + 1e-12);
  return restrict(m, [&](int t) {
    const auto& tri = m.triangles[t];
    return in[tri[0]] && in[tri[1]] && in[tri[2]];
  });
}

double triangle_quality(Complex a, Complex b, Complex c) {
  const double la = std::abs(b - c), lb = std::abs(c - a), lc = std::abs(a - b);
  const double area = 0.5 * std::abs(((b - a) * std::conj(c - a)).imag());
  if (area == 0.0) return 0.0;
  const double s = 0.5 * (la + lb + lc);
  const double r = area / s;
  const double R = la * lb * lc / (4.0 * area);
  return r / R;
}

double min_quality(const TriMesh& m) {
  double q = 1.0;
  for (const auto& t : m.triangles) q = std::min(q, triangle_quality(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]));
  return q;
}

std::string mesh_json(const TriMesh& m) {
  nlohmann::json j;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (Complex z : m.nodes) nodes.push_back({z.real(), z.imag()});
  j["triangles"] = m.triangles;
  j["region"] = m.region;
  auto edges = [](const std::vector<TaggedEdge>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : list) arr.push_back({{"a", e.a}, {"b", e.b}, {"tag", e.tag}});
    return arr;
  };
  j["tags"] = {{"boundary", edges(m.boundary)}, {"interfaces", edges(m.interfaces)}};
  return j.dump();
}

std::string nodes_csv(const TriMesh& m) {
  std::ostringstream os;
  os.precision(17);
  os << "id,x,y,tag\n";
  const auto tags = m.node_tags();
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    os << i << ',' << m.nodes[i].real() << ',' << m.nodes[i].imag() << ',' << tags[i] << '\n';
  }
  return os.str();
}

}  // namespace scherklab::mesh

#include "cdt.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "scherklab/mesh.hpp"

namespace scherklab::mesh::detail {

namespace {

using Rational = boost::multiprecision::cpp_rational;

int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

}  // namespace

int orient(Complex a, Complex b, Complex c) {
  const double detl = (b.real() - a.real()) * (c.imag() - a.imag());
  const double detr = (b.imag() - a.imag()) * (c.real() - a.real());
  const double det = detl - detr;
  const double bound = 3.3306690738754716e-16 * (std::abs(detl) + std::abs(detr));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  const Rational ax(a.real()), ay(a.imag()), bx(b.real()), by(b.imag()), cx(c.real()), cy(c.imag());
  return sign_of((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

int incircle(Complex a, Complex b, Complex c, Complex d) {
  const double adx = a.real() - d.real(), ady = a.imag() - d.imag();
  const double bdx = b.real() - d.real(), bdy = b.imag() - d.imag();
  const double cdx = c.real() - d.real(), cdy = c.imag() - d.imag();
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bc = bdx * cdy - bdy * cdx;
  const double ca = cdx * ady - cdy * adx;
  const double ab = adx * bdy - ady * bdx;
  const double det = alift * bc + blift * ca + clift * ab;
  const double permanent = (std::abs(bdx * cdy) + std::abs(bdy * cdx)) * alift +
                           (std::abs(cdx * ady) + std::abs(cdy * adx)) * blift +
                           (std::abs(adx * bdy) + std::abs(ady * bdx)) * clift;
  const double bound = 1.1102230246251577e-15 * permanent;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  const Rational dx(d.real()), dy(d.imag());
  const Rational rax = Rational(a.real()) - dx, ray = Rational(a.imag()) - dy;
  const Rational rbx = Rational(b.real()) - dx, rby = Rational(b.imag()) - dy;
  const Rational rcx = Rational(c.real()) - dx, rcy = Rational(c.imag()) - dy;
  const Rational r = (rax * rax + ray * ray) * (rbx * rcy - rby * rcx) +
                     (rbx * rbx + rby * rby) * (rcx * ray - rcy * rax) +
                     (rcx * rcx + rcy * rcy) * (rax * rby - ray * rbx);
  return sign_of(r);
}

namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using BPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using BSegment = bg::model::segment<BPoint>;
using RValue = std::pair<BSegment, int>;  // segment, piece id

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[i] is across the edge opposite v[i]
  std::uint32_t mask = 0;
  bool alive = true;
};

struct Segment {
  int a;
  int b;
  int piece;
  double t0;
  double t1;
};

std::uint64_t key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

Complex circumcenter(Complex a, Complex b, Complex c) {
  const Complex ba = b - a;
  const Complex ca = c - a;
  const double d = 2.0 * (ba.real() * ca.imag() - ba.imag() * ca.real());
  const double b2 = std::norm(ba);
  const double c2 = std::norm(ca);
  return a + Complex((ca.imag() * b2 - ba.imag() * c2) / d, (ba.real() * c2 - ca.real() * b2) / d);
}

class Mesher {
 public:
  explicit Mesher(const Input& in) : in_(in) {
    boundary_bits_ = 0;
    for (std::size_t l = 0; l < in.loops.size(); ++l) {
      if (in.loops[l].boundary) boundary_bits_ |= 1u << l;
    }
    const double big = 50.0;
    pts_ = {Complex(-big, -big), Complex(big, -big), Complex(0.0, big)};
    vtri_ = {0, 0, 0};
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, 0, true});
    const double s = std::sin(in.min_angle_deg * hyp::kPi / 180.0);
    max_ratio_ = 1.0 / (2.0 * s);
  }

  Output run() {
    sample_boundary();
    recover_segments();
    flood_fill();
    refine();
    return extract();
  }

 private:
  const Input& in_;
  std::vector<Complex> pts_;
  std::vector<int> vtri_;
  std::vector<Tri> tris_;
  std::vector<Segment> segs_;
  std::unordered_map<std::uint64_t, int> constrained_;
  std::uint32_t boundary_bits_;
  double max_ratio_;
  int hint_ = 0;
  std::vector<int> created_;
  std::vector<int> touched_;  // every triangle created since the last clear

  // --- basic topology -------------------------------------------------

  int locate(Complex p, int start) const {
    int t = start;
    if (t < 0 || !tris_[t].alive) t = hint_;
    if (!tris_[t].alive) t = last_alive();
    std::size_t guard = 0;
    int rot = 0;
    while (guard++ < 4 * tris_.size() + 100) {
      const Tri& tr = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rot) % 3;
        const Complex a = pts_[tr.v[(i + 1) % 3]];
        const Complex b = pts_[tr.v[(i + 2) % 3]];
        if (orient(a, b, p) < 0) {
          if (tr.n[i] < 0) return -1;
          t = tr.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      rot = (rot + 1) % 3;
    }
    for (std::size_t k = 0; k < tris_.size(); ++k) {
      const Tri& tr = tris_[k];
      if (!tr.alive) continue;
      if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
          orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0) {
        return static_cast<int>(k);
      }
    }
    return -1;
  }

  int last_alive() const {
    for (int k = static_cast<int>(tris_.size()) - 1; k >= 0; --k) {
      if (tris_[k].alive) return k;
    }
    return 0;
  }

  bool is_constrained(int a, int b) const { return constrained_.count(key(a, b)) > 0; }

  std::vector<int> cavity(Complex p, int t0) const {
    std::vector<int> cav = {t0};
    std::vector<int> stack = {t0};
    std::unordered_map<int, bool> seen = {{t0, true}};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const Tri& tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb < 0 || seen.count(nb)) continue;
        if (is_constrained(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
        const Tri& o = tris_[nb];
        if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0) {
          seen[nb] = true;
          cav.push_back(nb);
          stack.push_back(nb);
        }
      }
    }
    return cav;
  }

  // Retriangulates the cavity as a fan around the new point.
  int insert_into(Complex p, const std::vector<int>& cav) {
    const int pi = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);
    std::unordered_map<int, bool> in_cav;
    for (int t : cav) in_cav[t] = true;
    struct Bnd {
      int u, v, outer;
      std::uint32_t mask;
    };
    std::vector<Bnd> bnd;
    for (int t : cav) {
      const Tri& tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb >= 0 && in_cav.count(nb)) continue;
        bnd.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb, tr.mask});
      }
    }
    for (const Bnd& b : bnd) {
      if (orient(p, pts_[b.u], pts_[b.v]) <= 0) throw MeshError("degenerate insertion");
    }
    for (int t : cav) tris_[t].alive = false;
    std::unordered_map<int, int> by_u;
    std::unordered_map<int, int> by_v;
    created_.clear();
    for (const Bnd& b : bnd) {
      const int nt = static_cast<int>(tris_.size());
      tris_.push_back(Tri{{pi, b.u, b.v}, {b.outer, -1, -1}, b.mask, true});
      created_.push_back(nt);
      touched_.push_back(nt);
      by_u[b.u] = nt;
      by_v[b.v] = nt;
      if (b.outer >= 0) {
        Tri& o = tris_[b.outer];
        for (int j = 0; j < 3; ++j) {
          if ((o.v[(j + 1) % 3] == b.v && o.v[(j + 2) % 3] == b.u)) o.n[j] = nt;
        }
      }
      vtri_[b.u] = nt;
      vtri_[b.v] = nt;
      vtri_[pi] = nt;
    }
    for (int nt : created_) {
      Tri& tr = tris_[nt];
      tr.n[1] = by_u.at(tr.v[2]);  // edge (v, p)
      tr.n[2] = by_v.at(tr.v[1]);  // edge (p, u)
    }
    hint_ = created_.back();
    return pi;
  }

  int insert(Complex p, int start) {
    const int t = locate(p, start);
    if (t < 0) throw MeshError("point outside the triangulation");
    return insert_into(p, cavity(p, t));
  }

  bool edge_exists(int a, int b) const {
    const int t0 = vtri_[a];
    if (t0 < 0) return false;
    // Walk around a in both directions.
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      for (std::size_t guard = 0; guard < 1000 && t >= 0; ++guard) {
        const Tri& tr = tris_[t];
        int i = 0;
        while (tr.v[i] != a) ++i;
        if (tr.v[(i + 1) % 3] == b || tr.v[(i + 2) % 3] == b) return true;
        t = dir == 0 ? tr.n[(i + 1) % 3] : tr.n[(i + 2) % 3];
        if (t == t0) break;
      }
    }
    return false;
  }

  // --- boundary ----------------------------------------------------------

  std::vector<int> piece_first_vertex_;

  void sample_boundary() {
    const std::size_t np = in_.pieces.size();
    // Polyline index for local feature size.
    bgi::rtree<RValue, bgi::quadratic<16>> tree;
    for (std::size_t k = 0; k < np; ++k) {
      const hyp::Arc& c = in_.pieces[k].curve;
      const int m = 400;
      for (int i = 0; i < m; ++i) {
        const Complex a = c.point(static_cast<double>(i) / m);
        const Complex b = c.point(static_cast<double>(i + 1) / m);
        tree.insert({BSegment(BPoint(a.real(), a.imag()), BPoint(b.real(), b.imag())), static_cast<int>(k)});
      }
    }
    auto neighbours = [&](std::size_t k) {
      std::vector<int> out = {static_cast<int>(k)};
      const int loop = in_.pieces[k].loop;
      std::size_t first = k;
      while (first > 0 && in_.pieces[first - 1].loop == loop) --first;
      std::size_t last = k;
      while (last + 1 < np && in_.pieces[last + 1].loop == loop) ++last;
      const std::size_t count = last - first + 1;
      out.push_back(static_cast<int>(first + (k - first + 1) % count));
      out.push_back(static_cast<int>(first + (k - first + count - 1) % count));
      return out;
    };

    piece_first_vertex_.assign(np, -1);
    std::vector<std::vector<double>> params(np);
    for (std::size_t k = 0; k < np; ++k) {
      const hyp::Arc& c = in_.pieces[k].curve;
      const std::vector<int> skip = neighbours(k);
      const double L = std::abs(c.derivative(0.5));
      const int m = 2000;
      std::vector<double> density(m + 1);
      for (int i = 0; i <= m; ++i) {
        const Complex z = c.point(static_cast<double>(i) / m);
        double h = in_.size(z);
        const BPoint q(z.real(), z.imag());
        for (auto it = tree.qbegin(bgi::nearest(q, 8) &&
                                   bgi::satisfies([&](const RValue& v) {
                                     return std::find(skip.begin(), skip.end(), v.second) == skip.end();
                                   }));
             it != tree.qend(); ++it) {
          h = std::min(h, 0.5 * bg::distance(q, it->first));
        }
        density[i] = L / std::max(0.7 * h, 1e-9);
      }
      std::vector<double> cum(m + 1, 0.0);
      for (int i = 1; i <= m; ++i) cum[i] = cum[i - 1] + 0.5 * (density[i] + density[i - 1]) / m;
      const bool closed = std::abs(c.start - c.end) < 1e-12;
      const int nseg = std::max(closed ? 8 : 1, static_cast<int>(std::ceil(cum[m])));
      std::vector<double>& ts = params[k];
      ts.push_back(0.0);
      int j = 0;
      for (int s = 1; s < nseg; ++s) {
        const double target = cum[m] * s / nseg;
        while (j < m && cum[j + 1] < target) ++j;
        const double frac = (target - cum[j]) / std::max(cum[j + 1] - cum[j], 1e-300);
        ts.push_back((j + frac) / m);
      }
      ts.push_back(1.0);
    }

    // Insert vertices loop by loop, sharing piece endpoints.
    std::size_t k = 0;
    while (k < np) {
      const int loop = in_.pieces[k].loop;
      std::size_t last = k;
      while (last + 1 < np && in_.pieces[last + 1].loop == loop) ++last;
      const int loop_start = static_cast<int>(pts_.size());
      for (std::size_t q = k; q <= last; ++q) {
        const hyp::Arc& c = in_.pieces[q].curve;
        const std::vector<double>& ts = params[q];
        const int first = static_cast<int>(pts_.size());
        piece_first_vertex_[q] = first;
        std::vector<int> ids;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) ids.push_back(insert(i == 0 ? c.start : c.point(ts[i]), hint_));
        const int end_id = q == last ? loop_start : static_cast<int>(pts_.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const int b = i + 1 < ids.size() ? ids[i + 1] : end_id;
          segs_.push_back({ids[i], b, static_cast<int>(q), ts[i], ts[i + 1]});
        }
      }
      k = last + 1;
    }
  }

  std::deque<int> pending_;

  // Splits segment s at its curve midpoint; returns the new vertex.
  int split_segment(int s) {
    const Segment seg = segs_[s];
    constrained_.erase(key(seg.a, seg.b));
    const double tm = 0.5 * (seg.t0 + seg.t1);
    const Complex m = in_.pieces[seg.piece].curve.point(tm);
    if (std::abs(m - pts_[seg.a]) < 1e-13 || std::abs(m - pts_[seg.b]) < 1e-13) {
      throw MeshError("segment too short to split");
    }
    const int t = locate(m, vtri_[seg.a]);
    if (t < 0) throw MeshError("segment midpoint outside the triangulation");
    const int mi = insert_into(m, cavity(m, t));
    segs_[s] = {seg.a, mi, seg.piece, seg.t0, tm};
    segs_.push_back({mi, seg.b, seg.piece, tm, seg.t1});
    pending_.push_back(s);
    pending_.push_back(static_cast<int>(segs_.size()) - 1);
    return mi;
  }

  void recover_segments() {
    for (std::size_t s = 0; s < segs_.size(); ++s) pending_.push_back(static_cast<int>(s));
    drain_pending();
  }

  void drain_pending() {
    while (!pending_.empty()) {
      const int s = pending_.front();
      pending_.pop_front();
      const Segment& seg = segs_[s];
      if (is_constrained(seg.a, seg.b)) continue;
      if (edge_exists(seg.a, seg.b)) {
        constrained_[key(seg.a, seg.b)] = s;
      } else {
        split_segment(s);
      }
      if (pts_.size() > in_.max_nodes) throw MeshError("boundary recovery did not terminate");
    }
  }

  std::uint32_t loop_bit(int a, int b) const {
    const int s = constrained_.at(key(a, b));
    return 1u << in_.pieces[segs_[s].piece].loop;
  }

  void flood_fill() {
    std::vector<char> done(tris_.size(), 0);
    std::vector<int> stack;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      const Tri& tr = tris_[t];
      if (tr.v[0] < 3 || tr.v[1] < 3 || tr.v[2] < 3) {
        tris_[t].mask = 0;
        done[t] = 1;
        stack.push_back(static_cast<int>(t));
      }
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const Tri tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb < 0 || done[nb]) continue;
        const int a = tr.v[(i + 1) % 3];
        const int b = tr.v[(i + 2) % 3];
        tris_[nb].mask = is_constrained(a, b) ? tr.mask ^ loop_bit(a, b) : tr.mask;
        done[nb] = 1;
        stack.push_back(nb);
      }
    }
  }

  bool inside(const Tri& tr) const { return std::popcount(tr.mask & boundary_bits_) % 2 == 1; }

  // --- refinement ----------------------------------------------------------

  bool encroaches(Complex p, const Segment& s) const {
    const Complex a = pts_[s.a];
    const Complex b = pts_[s.b];
    return std::real((a - p) * std::conj(b - p)) < -1e-12 * std::norm(a - b);
  }

  // Segments with an encroaching apex on an inside triangle.
  bool segment_encroached(int s) const {
    const Segment& seg = segs_[s];
    const int t0 = vtri_[seg.a];
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      for (std::size_t guard = 0; guard < 1000 && t >= 0; ++guard) {
        const Tri& tr = tris_[t];
        int i = 0;
        while (tr.v[i] != seg.a) ++i;
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        if (inside(tr)) {
          if (tr.v[j] == seg.b && encroaches(pts_[tr.v[k]], seg)) return true;
          if (tr.v[k] == seg.b && encroaches(pts_[tr.v[j]], seg)) return true;
        }
        t = dir == 0 ? tr.n[j] : tr.n[k];
        if (t == t0) break;
      }
    }
    return false;
  }

  bool bad(int t) const {
    const Tri& tr = tris_[t];
    if (!tr.alive || !inside(tr)) return false;
    const Complex a = pts_[tr.v[0]];
    const Complex b = pts_[tr.v[1]];
    const Complex c = pts_[tr.v[2]];
    const Complex cc = circumcenter(a, b, c);
    const double R = std::abs(cc - a);
    const double lmin = std::min({std::abs(b - a), std::abs(c - b), std::abs(a - c)});
    if (R > max_ratio_ * lmin * (1.0 + 1e-9)) return true;
    const double h = in_.size((a + b + c) / 3.0);
    return R > h / std::sqrt(3.0);
  }

  void push_touched_segments(std::deque<int>& queue) const {
    for (int t : touched_) {
      const Tri& tr = tris_[t];
      if (!tr.alive) continue;
      for (int i = 0; i < 3; ++i) {
        auto it = constrained_.find(key(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3]));
        if (it != constrained_.end()) queue.push_back(it->second);
      }
    }
  }

  void split_encroached_all() {
    std::deque<int> queue;
    for (std::size_t s = 0; s < segs_.size(); ++s) queue.push_back(static_cast<int>(s));
    split_encroached(queue);
  }

  void split_encroached(std::deque<int>& queue) {
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      if (!is_constrained(segs_[s].a, segs_[s].b) || !segment_encroached(s)) continue;
      const std::size_t mark = touched_.size();
      split_segment(s);
      drain_pending();
      flood_fill();
      std::vector<int> fresh(touched_.begin() + static_cast<long>(mark), touched_.end());
      std::swap(fresh, touched_);
      push_touched_segments(queue);
      std::swap(fresh, touched_);
      if (pts_.size() > in_.max_nodes) throw MeshError("segment refinement did not terminate");
    }
  }

  // Walk from triangle t towards p without crossing segments. Returns the
  // containing triangle, or -(segment+2) for the first segment in the way.
  int walk_to(int t, Complex p) const {
    const Tri& start = tris_[t];
    const Complex origin = (pts_[start.v[0]] + pts_[start.v[1]] + pts_[start.v[2]]) / 3.0;
    int prev = -1;
    for (std::size_t guard = 0; guard < tris_.size() + 100; ++guard) {
      const Tri& tr = tris_[t];
      bool moved = false;
      for (int i = 0; i < 3; ++i) {
        const int a = tr.v[(i + 1) % 3];
        const int b = tr.v[(i + 2) % 3];
        if (orient(pts_[a], pts_[b], p) >= 0) continue;
        // Only cross edges that the segment origin -> p passes through.
        if (orient(origin, p, pts_[a]) * orient(origin, p, pts_[b]) > 0) continue;
        if (tr.n[i] == prev && prev >= 0) continue;
        if (is_constrained(a, b)) return -(constrained_.at(key(a, b)) + 2);
        if (tr.n[i] < 0) return -1;
        prev = t;
        t = tr.n[i];
        moved = true;
        break;
      }
      if (!moved) {
        // Either inside, or the straight walk stalled on a degenerate configuration.
        if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
            orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0) {
          return t;
        }
        return -1;
      }
    }
    return -1;
  }

  void refine() {
    split_encroached_all();
    std::deque<int> queue;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (bad(static_cast<int>(t))) queue.push_back(static_cast<int>(t));
    }
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      if (!bad(t)) continue;
      if (pts_.size() > in_.max_nodes) throw MeshError("refinement exceeded the node budget");
      const Tri tr = tris_[t];
      const Complex c = circumcenter(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]);
      const int w = walk_to(t, c);
      std::vector<int> to_split;
      std::vector<int> cav;
      if (w <= -2) {
        to_split.push_back(-w - 2);
      } else if (w < 0) {
        continue;
      } else {
        cav = cavity(c, w);
        for (int ct : cav) {
          const Tri& q = tris_[ct];
          for (int i = 0; i < 3; ++i) {
            const int a = q.v[(i + 1) % 3];
            const int b = q.v[(i + 2) % 3];
            auto it = constrained_.find(key(a, b));
            if (it != constrained_.end() && encroaches(c, segs_[it->second])) to_split.push_back(it->second);
          }
        }
      }
      if (!to_split.empty()) {
        std::sort(to_split.begin(), to_split.end());
        to_split.erase(std::unique(to_split.begin(), to_split.end()), to_split.end());
        touched_.clear();
        for (int s : to_split) {
          if (is_constrained(segs_[s].a, segs_[s].b)) {
            split_segment(s);
            drain_pending();
          }
        }
        flood_fill();
        std::deque<int> segq;
        push_touched_segments(segq);
        split_encroached(segq);
        queue.push_back(t);
        for (int k : touched_) {
          if (bad(k)) queue.push_back(k);
        }
        touched_.clear();
        continue;
      }
      insert_into(c, cav);
      touched_.clear();
      const std::vector<int> fresh = created_;
      for (int nt : fresh) {
        if (bad(nt)) queue.push_back(nt);
      }
    }
  }

  Output extract() const {
    Output out;
    std::vector<int> remap(pts_.size(), -1);
    std::vector<int> tri_index(tris_.size(), -1);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Tri& tr = tris_[t];
      if (!tr.alive || !inside(tr)) continue;
      std::array<int, 3> v{};
      for (int i = 0; i < 3; ++i) {
        if (remap[tr.v[i]] < 0) {
          remap[tr.v[i]] = static_cast<int>(out.nodes.size());
          out.nodes.push_back(pts_[tr.v[i]]);
        }
        v[i] = remap[tr.v[i]];
      }
      tri_index[t] = static_cast<int>(out.triangles.size());
      out.triangles.push_back(v);
      int region = 0;
      for (std::size_t l = 0; l < in_.loops.size(); ++l) {
        if (!in_.loops[l].boundary && (tr.mask & (1u << l))) region = in_.loops[l].region;
      }
      out.region.push_back(region);
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Tri& tr = tris_[t];
      if (!tr.alive || !inside(tr)) continue;
      for (int i = 0; i < 3; ++i) {
        const int a = tr.v[(i + 1) % 3];
        const int b = tr.v[(i + 2) % 3];
        auto it = constrained_.find(key(a, b));
        if (it == constrained_.end()) continue;
        const Segment& s = segs_[it->second];
        const int nb = tr.n[i];
        const bool other_inside = nb >= 0 && tris_[nb].alive && inside(tris_[nb]);
        if (!other_inside) {
          out.boundary.push_back({remap[a], remap[b], s.piece});
        } else if (a == s.a) {
          out.interfaces.push_back({remap[s.a], remap[s.b], s.piece});
        }
      }
    }
    return out;
  }
};

}  // namespace

Output triangulate(const Input& in) { return Mesher(in).run(); }

}  // namespace scherklab::mesh::detail

/// Unstructured meshing of the channel-minus-body region.
///
/// The approach is a fixed-boundary variant of force-based relaxation:
/// boundary chains are pre-sampled against a local size field (graded away
/// from the body, refined inside the wall gaps), the interior is seeded from
/// a quadtree matched to the same field, and point positions are relaxed with
/// repulsive edge springs on the evolving Delaunay connectivity.  A cleanup
/// stage removes or inserts points until every triangle clears the minimum
/// angle floor, and required chain edges are verified (with midpoint-split
/// recovery) so the final triangulation conforms to the domain boundary.

#include "cfsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cfsi/delaunay.hpp"

namespace cfsi {

namespace {

constexpr double kFscale = 1.2;        // spring rest-length inflation
constexpr double kStep = 0.2;          // pseudo-time step of the relaxation
constexpr double kSeedClear = 0.62;    // seed clearance, fraction of local size
constexpr double kSplit = 1.25;        // quadtree split threshold
constexpr double kPullTrigger = 0.34;  // boundary-proximity trigger for pull-in
constexpr double kPullClear = 0.5;     // clearance restored by pull-in
constexpr double kDriftRetri = 0.12;   // cumulative drift forcing retriangulation
constexpr double kConverged = 0.012;   // relative movement considered settled

using EKey = std::uint64_t;

EKey ekey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct ChainEdgeInfo {
  BTag tag = BTag::WallBottom;
  bool on_body = false;
};

// A polyline of fixed-point indices whose consecutive pairs must appear as
// boundary edges of the final triangulation.  Untagged chains (the symmetry
// line of the half-domain run) are required during generation but do not
// survive as boundary after mirroring.
struct Chain {
  std::vector<int> ids;
  bool closed = false;
  bool tagged = true;
  BTag tag = BTag::WallBottom;
  bool on_body = false;
};

struct Domain {
  std::vector<Vec2> fixed;
  std::vector<Chain> chains;
  std::function<double(const Vec2&)> sd;          // fluid region, < 0 inside
  std::function<double(const Vec2&)> size;        // local edge-length target
  std::function<Vec2(Vec2, double)> pull_in;      // restore clearance
  std::function<Vec2(const Vec2&)> project_body;  // snap to body boundary
  Vec2 lo{}, hi{};                                // seeding box
};

struct Proto {
  std::vector<Vec2> pts;
  std::vector<std::array<int, 3>> tris;
  std::unordered_map<EKey, ChainEdgeInfo> req;  // tagged boundary pairs
};

double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

double tri_min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 e0 = c - b, e1 = a - c, e2 = b - a;
  const double l0 = e0.norm(), l1 = e1.norm(), l2 = e2.norm();
  if (l0 <= 0 || l1 <= 0 || l2 <= 0) return 0.0;
  // law of cosines per corner, clamped for safety
  auto ang = [](double opp, double s1, double s2) {
    double ca = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2);
    ca = std::max(-1.0, std::min(1.0, ca));
    return std::acos(ca) * 180.0 / 3.14159265358979323846;
  };
  return std::min({ang(l0, l1, l2), ang(l1, l2, l0), ang(l2, l0, l1)});
}

class Builder {
 public:
  Builder(Domain dom, const MeshOptions& opts) : d_(std::move(dom)), o_(opts) {
    pts_ = d_.fixed;
    nf_ = static_cast<int>(pts_.size());
  }

  Proto run() {
    seed();
    if (static_cast<int>(pts_.size()) < 4)
      throw MeshFailure("mesh: domain too small for the requested size");
    retri();
    relax(o_.relax_iters);

    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      for (int round = 0; round < 10; ++round) {
        if (!cleanup_round()) break;
        relax(6);
      }
      const int repairs = verify_round();
      if (repairs == 0 && min_kept_angle() >= o_.min_angle_deg) {
        ok = true;
      } else {
        relax(6);
      }
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "mesh: could not reach quality floor (min angle "
          << min_kept_angle() << " deg after cleanup)";
      throw MeshFailure(msg.str());
    }

    Proto out;
    out.pts = pts_;
    out.tris = tris_;
    for (const Chain& c : d_.chains) {
      if (!c.tagged) continue;
      const int n = static_cast<int>(c.ids.size());
      const int last = c.closed ? n : n - 1;
      for (int k = 0; k < last; ++k)
        out.req[ekey(c.ids[k], c.ids[(k + 1) % n])] = {c.tag, c.on_body};
    }
    return out;
  }

 private:
  void seed() { seed_cell(d_.lo, d_.hi, 0); }

  void seed_cell(const Vec2& lo, const Vec2& hi, int depth) {
    const Vec2 c = (lo + hi) * 0.5;
    const double w = std::max(hi.x - lo.x, hi.y - lo.y);
    const double ell = d_.size(c);
    if (w <= kSplit * ell || depth >= 26) {
      if (d_.sd(c) < -kSeedClear * ell) {
        pts_.push_back(c);
        if (static_cast<int>(pts_.size()) > o_.max_points)
          throw MeshFailure("mesh: point budget exceeded (gap refinement too deep)");
      }
      return;
    }
    seed_cell(lo, c, depth + 1);
    seed_cell({c.x, lo.y}, {hi.x, c.y}, depth + 1);
    seed_cell({lo.x, c.y}, {c.x, hi.y}, depth + 1);
    seed_cell(c, hi, depth + 1);
  }

  void retri() {
    const auto all = delaunay(pts_);
    tris_.clear();
    std::unordered_set<EKey> eset;
    for (const auto& t : all) {
      const Vec2 c = (pts_[t[0]] + pts_[t[1]] + pts_[t[2]]) * (1.0 / 3.0);
      if (d_.sd(c) < 0.0) {
        tris_.push_back(t);
        eset.insert(ekey(t[0], t[1]));
        eset.insert(ekey(t[1], t[2]));
        eset.insert(ekey(t[2], t[0]));
      }
    }
    edg_.clear();
    edg_.reserve(eset.size());
    for (const EKey k : eset)
      edg_.push_back({static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffu)});
    std::sort(edg_.begin(), edg_.end());
    at_tri_.assign(pts_.begin() + nf_, pts_.end());
  }

  void relax(int iters) {
    std::vector<Vec2> force;
    std::vector<double> ell;
    for (int it = 0; it < iters; ++it) {
      // Retriangulate when points have drifted a meaningful fraction of the
      // local spacing since the connectivity was last rebuilt.
      double drift = 0.0;
      for (int k = 0; k < static_cast<int>(at_tri_.size()); ++k)
        drift = std::max(drift, dist(pts_[nf_ + k], at_tri_[k]) / d_.size(pts_[nf_ + k]));
      if (drift > kDriftRetri) retri();

      ell.resize(pts_.size());
      for (std::size_t i = 0; i < pts_.size(); ++i) ell[i] = d_.size(pts_[i]);

      // Global density normalisation as in classic force relaxation: rest
      // lengths are scaled so total actual and desired bar lengths agree.
      double sum_l2 = 0.0, sum_d2 = 0.0;
      for (const auto& e : edg_) {
        const double L = dist(pts_[e[0]], pts_[e[1]]);
        const double d = 0.5 * (ell[e[0]] + ell[e[1]]);
        sum_l2 += L * L;
        sum_d2 += d * d;
      }
      if (sum_d2 <= 0.0) return;
      const double scale = kFscale * std::sqrt(sum_l2 / sum_d2);

      force.assign(pts_.size(), Vec2{0.0, 0.0});
      for (const auto& e : edg_) {
        const Vec2 d = pts_[e[1]] - pts_[e[0]];
        const double L = std::max(d.norm(), 1e-14);
        const double L0 = scale * 0.5 * (ell[e[0]] + ell[e[1]]);
        if (L0 <= L) continue;  // repulsion only
        const Vec2 push = d * ((L0 - L) / L);
        force[e[0]] = force[e[0]] - push;
        force[e[1]] = force[e[1]] + push;
      }

      double moved = 0.0;
      for (int i = nf_; i < static_cast<int>(pts_.size()); ++i) {
        Vec2 p = pts_[i] + force[i] * kStep;
        const double loc = d_.size(p);
        if (d_.sd(p) > -kPullTrigger * loc) p = d_.pull_in(p, kPullClear * loc);
        moved = std::max(moved, dist(p, pts_[i]) / loc);
        pts_[i] = p;
      }
      if (moved < kConverged && it > 2) break;
    }
    retri();
  }

  // Remove interior endpoints of too-short edges in below-floor triangles, or
  // add a centroid point when every corner is pinned.  Returns true when the
  // point set changed (connectivity is rebuilt before returning).
  bool cleanup_round() {
    std::vector<char> dead(pts_.size(), 0);
    std::vector<Vec2> inserts;
    bool modified = false;
    for (const auto& t : tris_) {
      if (dead[t[0]] || dead[t[1]] || dead[t[2]]) continue;
      const Vec2 &a = pts_[t[0]], &b = pts_[t[1]], &c = pts_[t[2]];
      if (tri_min_angle_deg(a, b, c) >= o_.min_angle_deg) continue;

      // shortest edge of the offending triangle
      int si = t[0], sj = t[1], sk = t[2];
      double best = dist(a, b);
      if (dist(b, c) < best) { best = dist(b, c); si = t[1]; sj = t[2]; sk = t[0]; }
      if (dist(c, a) < best) { si = t[2]; sj = t[0]; sk = t[1]; }

      const bool i_free = si >= nf_, j_free = sj >= nf_, k_free = sk >= nf_;
      if (i_free || j_free) {
        int victim;
        if (i_free && j_free) victim = std::max(si, sj);
        else victim = i_free ? si : sj;
        dead[victim] = 1;
        modified = true;
      } else {
        const Vec2 cen = (a + b + c) * (1.0 / 3.0);
        if (d_.sd(cen) < -0.3 * d_.size(cen)) {
          inserts.push_back(cen);
          modified = true;
        } else if (k_free) {
          dead[sk] = 1;
          modified = true;
        }
        // otherwise: defer to chain recovery / final quality check
      }
    }
    if (!modified) return false;
    apply_deletions(dead);
    for (const Vec2& p : inserts) pts_.push_back(p);
    retri();
    return true;
  }

  void apply_deletions(const std::vector<char>& dead) {
    std::vector<Vec2> kept;
    kept.reserve(pts_.size());
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i)
      if (i < nf_ || !dead[i]) kept.push_back(pts_[i]);
    pts_ = std::move(kept);
  }

  // Check that every chain pair is a boundary edge (exactly one kept
  // triangle) and that no alien boundary edges appeared.  Missing edges are
  // recovered by splitting the chain at its midpoint after evicting nearby
  // free points; alien edges evict their free endpoints.  Returns the number
  // of repairs performed (0 means the triangulation conforms).
  int verify_round() {
    std::unordered_map<EKey, int> count;
    for (const auto& t : tris_) {
      ++count[ekey(t[0], t[1])];
      ++count[ekey(t[1], t[2])];
      ++count[ekey(t[2], t[0])];
    }
    std::unordered_set<EKey> required;
    struct Missing {
      int chain, pos;
    };
    std::vector<Missing> missing;
    for (int ci = 0; ci < static_cast<int>(d_.chains.size()); ++ci) {
      const Chain& c = d_.chains[ci];
      const int n = static_cast<int>(c.ids.size());
      const int last = c.closed ? n : n - 1;
      for (int k = 0; k < last; ++k) {
        const EKey key = ekey(c.ids[k], c.ids[(k + 1) % n]);
        required.insert(key);
        const auto it = count.find(key);
        if (it == count.end() || it->second != 1) missing.push_back({ci, k});
      }
    }

    std::vector<char> dead(pts_.size(), 0);
    int repairs = 0;

    // Alien boundary edges: an edge with one kept triangle that is not part
    // of any chain means a free point burrowed into the boundary layer.
    for (const auto& [key, cnt] : count) {
      if (cnt != 1 || required.count(key)) continue;
      const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      if (a >= nf_ && !dead[a]) { dead[a] = 1; ++repairs; }
      if (b >= nf_ && !dead[b]) { dead[b] = 1; ++repairs; }
    }

    // Split missing chain edges at their midpoints; group by chain and apply
    // in descending position so stored indices stay valid.
    std::sort(missing.begin(), missing.end(), [](const Missing& x, const Missing& y) {
      return x.chain != y.chain ? x.chain < y.chain : x.pos > y.pos;
    });
    std::vector<Vec2> new_fixed;
    for (const Missing& m : missing) {
      Chain& c = d_.chains[m.chain];
      const int n = static_cast<int>(c.ids.size());
      const Vec2 pa = pts_[c.ids[m.pos]], pb = pts_[c.ids[(m.pos + 1) % n]];
      Vec2 mid = (pa + pb) * 0.5;
      if (c.on_body) mid = d_.project_body(mid);
      // evict free points crowding the edge being recovered
      const double rad = 0.55 * dist(pa, pb);
      for (int i = nf_; i < static_cast<int>(pts_.size()); ++i)
        if (!dead[i] && dist(pts_[i], mid) < rad) { dead[i] = 1; }
      const int new_id = nf_ + static_cast<int>(new_fixed.size());
      new_fixed.push_back(mid);
      c.ids.insert(c.ids.begin() + m.pos + 1, new_id);
      ++repairs;
    }

    if (repairs == 0) return 0;
    // Rebuild the point array: fixed block + freshly recovered fixed points,
    // then surviving free points.  Chain ids referencing the old fixed block
    // are unchanged; recovered points were assigned ids right above.
    std::vector<Vec2> next;
    next.reserve(pts_.size() + new_fixed.size());
    next.insert(next.end(), pts_.begin(), pts_.begin() + nf_);
    next.insert(next.end(), new_fixed.begin(), new_fixed.end());
    for (int i = nf_; i < static_cast<int>(pts_.size()); ++i)
      if (!dead[i]) next.push_back(pts_[i]);
    pts_ = std::move(next);
    nf_ += static_cast<int>(new_fixed.size());
    retri();
    return repairs;
  }

  double min_kept_angle() const {
    double worst = 180.0;
    for (const auto& t : tris_)
      worst = std::min(worst, tri_min_angle_deg(pts_[t[0]], pts_[t[1]], pts_[t[2]]));
    return worst;
  }

  Domain d_;
  MeshOptions o_;
  std::vector<Vec2> pts_;
  int nf_ = 0;
  std::vector<std::array<int, 3>> tris_;
  std::vector<std::array<int, 2>> edg_;
  std::vector<Vec2> at_tri_;
};

// ---------------------------------------------------------------------------
// chain sampling

// Interior samples of the straight segment from -> to, spaced by the local
// size field.  Greedy ticks are rescaled to land exactly on the far end, and
// an undersized final interval is merged into its neighbour first.
std::vector<Vec2> march_segment(const Vec2& from, const Vec2& to,
                                const std::function<double(const Vec2&)>& size) {
  const double L = dist(from, to);
  auto lerp = [&](double t) { return from + (to - from) * t; };
  std::vector<double> ts{0.0};
  while (ts.back() < 1.0) {
    const double ell = std::max(size(lerp(ts.back())), 1e-12);
    ts.push_back(ts.back() + ell / L);
    if (ts.size() > 100000) throw MeshFailure("mesh: wall sampling diverged");
  }
  if (ts.size() >= 3 && (ts[ts.size() - 1] - ts[ts.size() - 2]) <
                            0.5 * (ts[ts.size() - 2] - ts[ts.size() - 3]))
    ts.erase(ts.end() - 2);
  const double s = 1.0 / ts.back();
  std::vector<Vec2> out;
  for (std::size_t k = 1; k + 1 < ts.size(); ++k) out.push_back(lerp(ts[k] * s));
  return out;
}

// Samples along the (placed) body boundary from parameter t0 over a span of
// dt_total (wrapping allowed).  include_first: emit the t0 point itself.
std::vector<Vec2> march_body_arc(const BodyShape& shape, const Placement& pl,
                                 double t0, double dt_total, bool include_first,
                                 const std::function<double(const Vec2&)>& size) {
  std::vector<double> ts{0.0};
  while (ts.back() < dt_total) {
    const double t = t0 + ts.back();
    const CurvePoint cp = shape.boundary(t - std::floor(t));
    const Vec2 p = to_channel_frame(pl, cp.p);
    const double speed = std::max(cp.d1.norm(), 1e-12);
    ts.push_back(ts.back() + std::max(size(p), 1e-12) / speed);
    if (ts.size() > 100000) throw MeshFailure("mesh: body sampling diverged");
  }
  if (ts.size() >= 3 && (ts[ts.size() - 1] - ts[ts.size() - 2]) <
                            0.5 * (ts[ts.size() - 2] - ts[ts.size() - 3]))
    ts.erase(ts.end() - 2);
  const double s = dt_total / ts.back();
  std::vector<Vec2> out;
  const std::size_t first = include_first ? 0 : 1;
  for (std::size_t k = first; k + 1 < ts.size(); ++k) {
    const double t = t0 + ts[k] * s;
    out.push_back(to_channel_frame(pl, shape.boundary(t - std::floor(t)).p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// size field / signed distance / pull-in closures

struct FieldSet {
  std::function<double(const Vec2&)> sd;
  std::function<double(const Vec2&)> size;
  std::function<Vec2(Vec2, double)> pull_in;
  std::function<Vec2(const Vec2&)> project_body;
  double body_size = 0.0;
};

FieldSet make_fields(const Channel& ch, const BodyShape& shape, const Placement& pl,
                     const MeshOptions& opts, bool upper_half) {
  if (!is_admissible(ch, shape, pl, 0.0))
    throw MeshFailure("mesh: body touches or leaves the channel");
  const Extents ext = body_extents(shape, pl.theta);
  const Gaps g = gaps(ch, ext, pl.h);
  const double gap_min = std::min(g.eps_b, g.eps_t);
  const double body_size =
      std::min({opts.size / std::max(1.0, opts.body_refine), gap_min / opts.gap_refine,
                0.8 * shape.min_curvature_radius()});
  if (body_size <= 0.0) throw MeshFailure("mesh: degenerate size field");

  const double L = ch.Lrect, H = ch.H;
  FieldSet f;
  f.body_size = body_size;
  f.sd = [=, &shape](const Vec2& p) {
    const double rect = upper_half
                            ? std::max({std::abs(p.x) - L, p.y - H, -p.y})
                            : std::max(std::abs(p.x) - L, std::abs(p.y) - H);
    return std::max(rect, -signed_distance(shape, pl, p));
  };
  f.size = [=, &shape](const Vec2& p) {
    const double d = std::max(0.0, signed_distance(shape, pl, p));
    return std::min(opts.size, body_size + opts.grading * d);
  };
  f.pull_in = [=, &shape](Vec2 p, double clear) {
    for (int pass = 0; pass < 2; ++pass) {
      p.x = std::min(L - clear, std::max(-L + clear, p.x));
      const double ylo = upper_half ? clear : -H + clear;
      p.y = std::min(H - clear, std::max(ylo, p.y));
      const double sb = signed_distance(shape, pl, p);
      if (sb >= clear) break;
      const Vec2 cp = closest_point(shape, pl, p);
      Vec2 dir = (sb >= 0.0) ? p - cp : cp - p;
      double dn = dir.norm();
      if (dn < 1e-14) {
        dir = p - Vec2{0.0, pl.h};
        dn = dir.norm();
        if (dn < 1e-14) { dir = {1.0, 0.0}; dn = 1.0; }
      }
      p = cp + dir * (clear / dn);
    }
    return p;
  };
  f.project_body = [=, &shape](const Vec2& p) { return closest_point(shape, pl, p); };
  return f;
}

// ---------------------------------------------------------------------------
// assembly of the public Mesh structure

// Build edges, adjacency, plain midpoints and oriented boundary for a vertex/
// triangle soup.  Tags and curved midpoints are patched in by the caller.
void finalize_connectivity(Mesh& m) {
  std::unordered_map<EKey, int> eid;
  m.edges.clear();
  m.tri_edges.assign(m.tris.size(), {-1, -1, -1});
  for (std::size_t t = 0; t < m.tris.size(); ++t) {
    const auto& v = m.tris[t];
    for (int i = 0; i < 3; ++i) {
      int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      const EKey k = ekey(a, b);
      auto it = eid.find(k);
      int id;
      if (it == eid.end()) {
        id = static_cast<int>(m.edges.size());
        eid.emplace(k, id);
        if (a > b) std::swap(a, b);
        m.edges.push_back({a, b});
      } else {
        id = it->second;
      }
      m.tri_edges[t][i] = id;
    }
  }
  m.edge_tris.assign(m.edges.size(), {-1, -1});
  for (std::size_t t = 0; t < m.tris.size(); ++t)
    for (int i = 0; i < 3; ++i) {
      auto& et = m.edge_tris[m.tri_edges[t][i]];
      if (et[0] < 0) et[0] = static_cast<int>(t);
      else if (et[1] < 0) et[1] = static_cast<int>(t);
      else throw MeshFailure("mesh: non-manifold edge");
    }

  m.midpoints.resize(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e)
    m.midpoints[e] = (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]) * 0.5;
  m.edge_on_body.assign(m.edges.size(), 0);

  m.boundary.clear();
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (m.edge_tris[e][1] >= 0) continue;
    const int t = m.edge_tris[e][0];
    if (t < 0) throw MeshFailure("mesh: dangling edge");
    BoundaryEdge be;
    be.edge = static_cast<int>(e);
    be.tri = t;
    for (int i = 0; i < 3; ++i)
      if (m.tri_edges[t][i] == static_cast<int>(e)) {
        be.a = m.tris[t][(i + 1) % 3];  // CCW in the triangle: fluid on the left
        be.b = m.tris[t][(i + 2) % 3];
      }
    m.boundary.push_back(be);
  }
  std::sort(m.boundary.begin(), m.boundary.end(),
            [](const BoundaryEdge& x, const BoundaryEdge& y) { return x.edge < y.edge; });
}

Mesh assemble(const std::vector<Vec2>& pts, const std::vector<std::array<int, 3>>& tris,
              const std::unordered_map<EKey, ChainEdgeInfo>& req,
              const std::function<Vec2(const Vec2&)>& project_body,
              const std::unordered_map<EKey, Vec2>& mid_override,
              int expected_euler, const MeshOptions& opts) {
  // compact away any vertex not referenced by a kept triangle
  std::vector<int> remap(pts.size(), -1);
  Mesh m;
  for (const auto& t : tris)
    for (const int v : t)
      if (remap[v] < 0) {
        remap[v] = m.n_vertices();
        m.vertices.push_back(pts[v]);
      }
  m.tris.reserve(tris.size());
  for (const auto& t : tris) {
    const std::array<int, 3> r{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (orient2d(m.vertices[r[0]], m.vertices[r[1]], m.vertices[r[2]]) <= 0.0)
      throw MeshFailure("mesh: degenerate or misoriented triangle");
    m.tris.push_back(r);
  }
  m.target_size = opts.size;

  finalize_connectivity(m);

  std::unordered_map<EKey, ChainEdgeInfo> req2;
  for (const auto& [k, info] : req) {
    const int a = remap[static_cast<int>(k >> 32)];
    const int b = remap[static_cast<int>(k & 0xffffffffu)];
    if (a < 0 || b < 0) throw MeshFailure("mesh: required boundary vertex unused");
    req2[ekey(a, b)] = info;
  }
  std::unordered_map<EKey, Vec2> mid2;
  for (const auto& [k, p] : mid_override) {
    const int a = remap[static_cast<int>(k >> 32)];
    const int b = remap[static_cast<int>(k & 0xffffffffu)];
    if (a >= 0 && b >= 0) mid2[ekey(a, b)] = p;
  }

  if (m.boundary.size() != req2.size())
    throw MeshFailure("mesh: boundary does not match the required chain edges");
  for (BoundaryEdge& be : m.boundary) {
    const auto it = req2.find(ekey(be.a, be.b));
    if (it == req2.end()) throw MeshFailure("mesh: alien boundary edge survived");
    be.tag = it->second.tag;
    if (it->second.on_body) {
      m.edge_on_body[be.edge] = 1;
      const auto ov = mid2.find(ekey(be.a, be.b));
      m.midpoints[be.edge] = (ov != mid2.end()) ? ov->second
                                                : project_body(m.midpoints[be.edge]);
    }
  }

  const QualityReport q = quality_report(m);
  if (q.euler_characteristic != expected_euler)
    throw MeshFailure("mesh: unexpected topology");
  if (q.min_angle_deg < opts.min_angle_deg - 1e-9)
    throw MeshFailure("mesh: quality floor violated in final mesh");
  return m;
}

Domain make_full_domain(const Channel& ch, const BodyShape& shape, const Placement& pl,
                        const FieldSet& f) {
  Domain d;
  d.sd = f.sd;
  d.size = f.size;
  d.pull_in = f.pull_in;
  d.project_body = f.project_body;
  d.lo = {-ch.Lrect, -ch.H};
  d.hi = {ch.Lrect, ch.H};

  const Vec2 c0{-ch.Lrect, -ch.H}, c1{ch.Lrect, -ch.H}, c2{ch.Lrect, ch.H},
      c3{-ch.Lrect, ch.H};
  d.fixed = {c0, c1, c2, c3};

  auto add_wall = [&](const Vec2& from, const Vec2& to, int ia, int ib, BTag tag) {
    Chain c;
    c.tag = tag;
    c.ids.push_back(ia);
    for (const Vec2& p : march_segment(from, to, f.size)) {
      c.ids.push_back(static_cast<int>(d.fixed.size()));
      d.fixed.push_back(p);
    }
    c.ids.push_back(ib);
    d.chains.push_back(std::move(c));
  };
  add_wall(c0, c1, 0, 1, BTag::WallBottom);
  add_wall(c1, c2, 1, 2, BTag::WallRight);
  add_wall(c2, c3, 2, 3, BTag::WallTop);
  add_wall(c3, c0, 3, 0, BTag::WallLeft);

  Chain body;
  body.closed = true;
  body.tag = BTag::Body;
  body.on_body = true;
  for (const Vec2& p : march_body_arc(shape, pl, 0.0, 1.0, true, f.size)) {
    body.ids.push_back(static_cast<int>(d.fixed.size()));
    d.fixed.push_back(p);
  }
  if (body.ids.size() < 8) throw MeshFailure("mesh: body chain too coarse");
  d.chains.push_back(std::move(body));
  return d;
}

// Parameters of the two boundary points with x2 = 0 (body frame == channel
// frame here: the symmetric path requires h = 0, theta = 0).
std::array<double, 2> symmetry_crossings(const BodyShape& shape) {
  const int n = 2048;
  std::vector<double> hits;
  auto yat = [&](double t) { return shape.boundary(t - std::floor(t)).p.y; };
  for (int k = 0; k < n; ++k) {
    const double ta = (k + 0.5) / n, tb = (k + 1.5) / n;
    double ya = yat(ta), yb = yat(tb);
    if (ya == 0.0) { hits.push_back(ta - std::floor(ta)); continue; }
    if ((ya < 0) == (yb < 0) || yb == 0.0) continue;
    double lo = ta, hi = tb, ylo = ya;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi), ym = yat(mid);
      if (ym == 0.0) { lo = hi = mid; break; }
      if ((ym < 0) == (ylo < 0)) { lo = mid; ylo = ym; } else { hi = mid; }
    }
    hits.push_back(0.5 * (lo + hi) - std::floor(0.5 * (lo + hi)));
  }
  // dedupe (the wrap interval can re-find the first hit)
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             hits.end());
  if (hits.size() == 2 && hits.back() - hits.front() > 1.0 - 1e-9) hits.pop_back();
  if (hits.size() != 2)
    throw MeshFailure("mesh: symmetric body must cross x2=0 exactly twice");
  // order: first the crossing with x > 0
  const double x0 = shape.boundary(hits[0]).p.x;
  if (x0 > 0.0) return {hits[0], hits[1]};
  return {hits[1], hits[0]};
}

}  // namespace

Mesh triangulate(const Channel& ch, const BodyShape& shape, const Placement& pl,
                 const MeshOptions& opts) {
  if (opts.size <= 0.0 || opts.grading < 0.0 || opts.gap_refine < 1.0)
    throw MeshFailure("mesh: invalid options");
  const FieldSet f = make_fields(ch, shape, pl, opts, false);
  Domain d = make_full_domain(ch, shape, pl, f);
  Proto proto = Builder(std::move(d), opts).run();
  return assemble(proto.pts, proto.tris, proto.req, f.project_body, {}, 0, opts);
}

Mesh symmetrize(const Channel& ch, const BodyShape& shape, const Placement& pl,
                const MeshOptions& opts) {
  if (pl.h != 0.0 || pl.theta != 0.0)
    throw MeshFailure("mesh: symmetric meshing needs h = 0 and theta = 0");
  if (!shape.mirror_symmetric())
    throw MeshFailure("mesh: symmetric meshing needs a mirror-symmetric body");
  if (opts.size <= 0.0 || opts.grading < 0.0 || opts.gap_refine < 1.0)
    throw MeshFailure("mesh: invalid options");

  const FieldSet f = make_fields(ch, shape, pl, opts, true);
  const auto [t_right, t_left] = symmetry_crossings(shape);

  Domain d;
  d.sd = f.sd;
  d.size = f.size;
  d.pull_in = f.pull_in;
  d.project_body = f.project_body;
  d.lo = {-ch.Lrect, 0.0};
  d.hi = {ch.Lrect, ch.H};

  const Vec2 xr{shape.boundary(t_right).p.x, 0.0};  // exact zero ordinates
  const Vec2 xl{shape.boundary(t_left).p.x, 0.0};
  const Vec2 c0{ch.Lrect, 0.0}, c1{ch.Lrect, ch.H}, c2{-ch.Lrect, ch.H},
      c3{-ch.Lrect, 0.0};
  d.fixed = {c0, c1, c2, c3, xr, xl};  // ids 0..5

  auto add_chain = [&](const Vec2& from, const Vec2& to, int ia, int ib, BTag tag,
                       bool tagged) {
    Chain c;
    c.tag = tag;
    c.tagged = tagged;
    c.ids.push_back(ia);
    for (const Vec2& p : march_segment(from, to, f.size)) {
      c.ids.push_back(static_cast<int>(d.fixed.size()));
      d.fixed.push_back(p);
    }
    c.ids.push_back(ib);
    d.chains.push_back(std::move(c));
  };
  add_chain(c0, c1, 0, 1, BTag::WallRight, true);
  add_chain(c1, c2, 1, 2, BTag::WallTop, true);
  add_chain(c2, c3, 2, 3, BTag::WallLeft, true);
  add_chain(c3, xl, 3, 5, BTag::WallBottom, false);  // symmetry line, untagged
  add_chain(xr, c0, 4, 0, BTag::WallBottom, false);

  Chain arc;  // upper body arc from the x>0 crossing to the x<0 crossing
  arc.tag = BTag::Body;
  arc.on_body = true;
  arc.ids.push_back(4);
  double span = t_left - t_right;
  if (span <= 0.0) span += 1.0;
  for (const Vec2& p : march_body_arc(shape, pl, t_right, span, false, f.size)) {
    arc.ids.push_back(static_cast<int>(d.fixed.size()));
    d.fixed.push_back(p);
  }
  arc.ids.push_back(5);
  if (arc.ids.size() < 5) throw MeshFailure("mesh: body arc too coarse");
  d.chains.push_back(std::move(arc));

  Proto half = Builder(std::move(d), opts).run();

  // Mirror the half mesh across x2 = 0 with exact sign flips.
  std::vector<Vec2> pts = half.pts;
  std::vector<int> mir(half.pts.size());
  for (std::size_t i = 0; i < half.pts.size(); ++i) {
    if (half.pts[i].y == 0.0) {
      mir[i] = static_cast<int>(i);
    } else {
      mir[i] = static_cast<int>(pts.size());
      pts.push_back({half.pts[i].x, -half.pts[i].y});
    }
  }
  std::vector<std::array<int, 3>> tris = half.tris;
  for (const auto& t : half.tris) tris.push_back({mir[t[0]], mir[t[2]], mir[t[1]]});

  std::unordered_map<EKey, ChainEdgeInfo> req;
  std::unordered_map<EKey, Vec2> mid_override;
  for (const auto& [k, info] : half.req) {
    const int a = static_cast<int>(k >> 32), b = static_cast<int>(k & 0xffffffffu);
    req[k] = info;
    ChainEdgeInfo minfo = info;
    if (info.tag == BTag::WallTop) minfo.tag = BTag::WallBottom;
    req[ekey(mir[a], mir[b])] = minfo;
    if (info.on_body) {
      const Vec2 mid = f.project_body((half.pts[a] + half.pts[b]) * 0.5);
      mid_override[k] = mid;
      mid_override[ekey(mir[a], mir[b])] = Vec2{mid.x, -mid.y};
    }
  }
  return assemble(pts, tris, req, f.project_body, mid_override, 0, opts);
}

QualityReport quality_report(const Mesh& m) {
  QualityReport q;
  q.n_vertices = m.n_vertices();
  q.n_edges = m.n_edges();
  q.n_tris = m.n_tris();
  q.n_boundary_edges = static_cast<int>(m.boundary.size());
  q.euler_characteristic = q.n_vertices - q.n_edges + q.n_tris;
  q.min_angle_deg = 180.0;
  q.max_aspect = 0.0;
  q.area_sum = 0.0;
  for (const auto& t : m.tris) {
    const Vec2 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    q.min_angle_deg = std::min(q.min_angle_deg, tri_min_angle_deg(a, b, c));
    const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    const double area = 0.5 * std::abs((b - a).cross(c - a));
    q.area_sum += area;
    if (area > 0.0) {
      const double s = 0.5 * (la + lb + lc);
      const double inr = area / s;
      const double circ = la * lb * lc / (4.0 * area);
      q.max_aspect = std::max(q.max_aspect, circ / (2.0 * inr));
    }
  }
  if (m.tris.empty()) q.min_angle_deg = 0.0;
  return q;
}

void dump_mesh(const Mesh& m, std::ostream& os) {
  os << "mesh 1\n";
  int n_body = 0;
  for (const BoundaryEdge& be : m.boundary)
    if (be.tag == BTag::Body) ++n_body;
  os << m.n_vertices() << ' ' << m.n_tris() << ' ' << m.boundary.size() << ' '
     << n_body << ' ' << std::setprecision(17) << m.target_size << '\n';
  os << std::setprecision(17);
  for (const Vec2& v : m.vertices) os << v.x << ' ' << v.y << '\n';
  for (const auto& t : m.tris) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  auto tag_name = [](BTag t) {
    switch (t) {
      case BTag::WallBottom: return "bottom";
      case BTag::WallTop: return "top";
      case BTag::WallLeft: return "left";
      case BTag::WallRight: return "right";
      case BTag::Body: return "body";
    }
    return "?";
  };
  for (const BoundaryEdge& be : m.boundary)
    os << be.a << ' ' << be.b << ' ' << tag_name(be.tag) << '\n';
  for (const BoundaryEdge& be : m.boundary) {
    if (be.tag != BTag::Body) continue;
    const Vec2& mp = m.midpoints[be.edge];
    os << be.a << ' ' << be.b << ' ' << mp.x << ' ' << mp.y << '\n';
  }
}

Mesh load_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (!is || magic != "mesh" || version != 1)
    throw MeshFailure("mesh: unrecognized dump header");
  int nv = 0, nt = 0, nb = 0, nbody = 0;
  double target = 0.0;
  is >> nv >> nt >> nb >> nbody >> target;
  if (!is || nv < 3 || nt < 1 || nb < 3 || nbody < 0 || nbody > nb)
    throw MeshFailure("mesh: corrupt dump counts");

  Mesh m;
  m.target_size = target;
  m.vertices.resize(nv);
  for (Vec2& v : m.vertices) is >> v.x >> v.y;
  m.tris.resize(nt);
  for (auto& t : m.tris) {
    is >> t[0] >> t[1] >> t[2];
    for (const int v : t)
      if (v < 0 || v >= nv) throw MeshFailure("mesh: vertex index out of range");
    if (orient2d(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) <= 0.0)
      throw MeshFailure("mesh: dump triangle not counter-clockwise");
  }
  struct TaggedPair {
    int a, b;
    BTag tag;
  };
  std::vector<TaggedPair> tagged(nb);
  auto parse_tag = [](const std::string& s) {
    if (s == "bottom") return BTag::WallBottom;
    if (s == "top") return BTag::WallTop;
    if (s == "left") return BTag::WallLeft;
    if (s == "right") return BTag::WallRight;
    if (s == "body") return BTag::Body;
    throw MeshFailure("mesh: unknown boundary tag");
  };
  for (TaggedPair& tp : tagged) {
    std::string s;
    is >> tp.a >> tp.b >> s;
    tp.tag = parse_tag(s);
  }
  std::unordered_map<EKey, Vec2> body_mid;
  for (int k = 0; k < nbody; ++k) {
    int a, b;
    Vec2 p;
    is >> a >> b >> p.x >> p.y;
    body_mid[ekey(a, b)] = p;
  }
  if (!is) throw MeshFailure("mesh: truncated dump");

  finalize_connectivity(m);
  if (static_cast<int>(m.boundary.size()) != nb)
    throw MeshFailure("mesh: dump boundary does not match triangulation");
  std::unordered_map<EKey, BTag> tagmap;
  for (const TaggedPair& tp : tagged) tagmap[ekey(tp.a, tp.b)] = tp.tag;
  for (BoundaryEdge& be : m.boundary) {
    const auto it = tagmap.find(ekey(be.a, be.b));
    if (it == tagmap.end()) throw MeshFailure("mesh: untagged boundary edge in dump");
    be.tag = it->second;
    if (be.tag == BTag::Body) {
      const auto mv = body_mid.find(ekey(be.a, be.b));
      if (mv == body_mid.end()) throw MeshFailure("mesh: missing body midpoint");
      m.edge_on_body[be.edge] = 1;
      m.midpoints[be.edge] = mv->second;
    }
  }
  return m;
}

}  // namespace cfsi

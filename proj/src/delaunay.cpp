/// Incremental Bowyer–Watson triangulation with adjacency walking and
/// filtered geometric predicates.  Points are inserted in Morton order so the
/// located triangle is almost always a neighbour of the previous one.

#include "cfsi/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

namespace cfsi {

namespace {

using Rational = boost::multiprecision::cpp_rational;

double orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const Rational det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  const int s = det.sign();
  return s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
}

double incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Rational adx = Rational(a.x) - Rational(d.x), ady = Rational(a.y) - Rational(d.y);
  const Rational bdx = Rational(b.x) - Rational(d.x), bdy = Rational(b.y) - Rational(d.y);
  const Rational cdx = Rational(c.x) - Rational(d.x), cdy = Rational(c.y) - Rational(d.y);
  const Rational det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
                       (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                       (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  const int s = det.sign();
  return s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
}

// Interleave the low 32 bits of x and y into a 64-bit Morton key.
std::uint64_t spread_bits(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x << 2)) & 0x3333333333333333ull;
  x = (x | (x << 1)) & 0x5555555555555555ull;
  return x;
}

struct Tri {
  std::array<int, 3> v;    // counter-clockwise vertex indices
  std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]; -1 on hull
};

}  // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detl = (b.x - a.x) * (c.y - a.y);
  const double detr = (b.y - a.y) * (c.x - a.x);
  const double det = detl - detr;
  const double detsum = std::abs(detl) + std::abs(detr);
  // 3*eps + small slack; standard first-stage filter bound.
  if (std::abs(det) > 3.3306690738754716e-16 * detsum) return det;
  if (detsum == 0.0) return 0.0;
  return orient2d_exact(a, b, c);
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > 1.1102230246251565e-15 * permanent) return det;
  if (permanent == 0.0) return 0.0;
  return incircle_exact(a, b, c, d);
}

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");

  // Bounding square for the super-triangle and for Morton keys.
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
  for (const Vec2& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::vector<std::uint64_t> key(n);
  const double scale = 4294967295.0 / span;
  for (int i = 0; i < n; ++i) {
    const auto kx = static_cast<std::uint32_t>(std::min(4294967295.0, std::max(0.0, (pts[i].x - lo_x) * scale)));
    const auto ky = static_cast<std::uint32_t>(std::min(4294967295.0, std::max(0.0, (pts[i].y - lo_y) * scale)));
    key[i] = spread_bits(kx) | (spread_bits(ky) << 1);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });

  // Working point array with three far-away super vertices appended.
  std::vector<Vec2> pw = pts;
  const double big = 64.0 * span + 64.0 * std::max({std::abs(lo_x), std::abs(hi_x), std::abs(lo_y), std::abs(hi_y), 1.0});
  const Vec2 cen{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)};
  pw.push_back({cen.x - big, cen.y - big});
  pw.push_back({cen.x + big, cen.y - big});
  pw.push_back({cen.x, cen.y + big});

  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(2 * n + 16));
  std::vector<char> alive;
  alive.reserve(tris.capacity());
  tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}});
  alive.push_back(1);

  // Scratch buffers reused across insertions; epoch stamps avoid clearing.
  std::vector<int> cavity, stack;
  std::vector<int> cav_mark, vis_mark;
  int epoch = 0;
  struct Rim {
    int a, b;     // directed cavity-boundary edge, cavity on the left
    int outside;  // triangle beyond the rim, -1 on the super hull
    int made;     // new triangle built on this rim edge
  };
  std::vector<Rim> rim;

  int hint = 0;
  for (const int ip : order) {
    const Vec2 p = pw[ip];

    // Locate a triangle containing p by walking across edges that p is
    // outside of.  The walk is deterministic (first violated edge wins).
    int t = hint;
    if (!alive[t]) {
      t = -1;
      for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
        if (alive[i]) {
          t = i;
          break;
        }
    }
    bool found = false;
    for (std::size_t step = 0; step <= 4 * tris.size() + 16; ++step) {
      const Tri& tr = tris[t];
      int move = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient2d(pw[tr.v[(i + 1) % 3]], pw[tr.v[(i + 2) % 3]], p) < 0.0) {
          move = tr.nbr[i];
          break;
        }
      }
      if (move == -1) {
        found = true;
        break;
      }
      if (move < 0) throw std::runtime_error("delaunay: walk left the triangulation");
      t = move;
    }
    if (!found) throw std::runtime_error("delaunay: point location failed");
    for (const int v : tris[t].v)
      if (pw[v].x == p.x && pw[v].y == p.y)
        throw std::runtime_error("delaunay: duplicate input point");

    // Grow the cavity of triangles whose circumcircle contains p.
    ++epoch;
    cavity.clear();
    stack.clear();
    cav_mark.resize(tris.size(), 0);
    vis_mark.resize(tris.size(), 0);
    stack.push_back(t);
    vis_mark[t] = epoch;
    cav_mark[t] = epoch;
    cavity.push_back(t);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[c].nbr[i];
        if (nb < 0 || vis_mark[nb] == epoch) continue;
        vis_mark[nb] = epoch;
        const Tri& tn = tris[nb];
        if (incircle(pw[tn.v[0]], pw[tn.v[1]], pw[tn.v[2]], p) > 0.0) {
          cav_mark[nb] = epoch;
          cavity.push_back(nb);
          stack.push_back(nb);
        }
      }
    }

    // Collect the rim (directed boundary edges of the cavity).
    rim.clear();
    for (const int c : cavity) {
      const Tri& tc = tris[c];
      for (int i = 0; i < 3; ++i) {
        const int nb = tc.nbr[i];
        if (nb >= 0 && cav_mark[nb] == epoch) continue;
        rim.push_back({tc.v[(i + 1) % 3], tc.v[(i + 2) % 3], nb, -1});
      }
    }

    // Retriangulate the cavity as a fan around the new point.
    for (Rim& e : rim) {
      const int id = static_cast<int>(tris.size());
      e.made = id;
      tris.push_back({{e.a, e.b, ip}, {-1, -1, -1}});
      alive.push_back(1);
      if (e.outside >= 0) {
        tris[id].nbr[2] = e.outside;  // across (a,b), opposite ip
        Tri& out = tris[e.outside];
        for (int i = 0; i < 3; ++i)
          if (out.v[(i + 1) % 3] == e.b && out.v[(i + 2) % 3] == e.a) out.nbr[i] = id;
      }
    }
    // Link consecutive fan triangles through their shared spokes.
    for (const Rim& e : rim) {
      for (const Rim& f : rim) {
        if (f.a == e.b) tris[e.made].nbr[0] = f.made;  // across (b, ip), opposite a
        if (f.b == e.a) tris[e.made].nbr[1] = f.made;  // across (ip, a), opposite b
      }
    }
    for (const int c : cavity) alive[c] = 0;
    hint = rim.empty() ? hint : rim.front().made;
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size() / 2);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (!alive[i]) continue;
    const auto& v = tris[i].v;
    if (v[0] >= n || v[1] >= n || v[2] >= n) continue;
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

}  // namespace cfsi

#include "cfsi/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cfsi {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre rule on [0,1]; used for boundary moment integrals.
// Segments are integrated exactly, arcs to machine precision.
constexpr int kGL = 16;
constexpr std::array<double, kGL> kGLx = {
    0.0052995325041750337, 0.0277124884633837046, 0.0671843988060841224,
    0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
    0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
    0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
    0.8777022041775015132, 0.9328156011939158776, 0.9722875115366162954,
    0.9947004674958249663};
constexpr std::array<double, kGL> kGLw = {
    0.0135762297058770482, 0.0311267619693239468, 0.0475792558412463928,
    0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
    0.0913017075224617919, 0.0947253052275342510, 0.0947253052275342510,
    0.0913017075224617919, 0.0845782596975012679, 0.0747979944082883680,
    0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239468,
    0.0135762297058770482};

double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b, Vec2* closest) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 c = a + t * ab;
  if (closest) *closest = c;
  return (q - c).norm();
}

}  // namespace

Channel::Channel(double Lrect_, double H_) : Lrect(Lrect_), H(H_) {
  if (!(Lrect > H && H > 0.0))
    throw GeometryError("channel requires Lrect > H > 0, got Lrect=" + std::to_string(Lrect) +
                        " H=" + std::to_string(H));
}

BodyShape BodyShape::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
  BodyShape s;
  s.kind_ = Kind::Ellipse;
  s.a_ = a;
  s.b_ = b;
  s.area_ = kPi * a * b;
  // Ramanujan's perimeter approximation is not exact; integrate instead.
  double per = 0.0;
  for (int k = 0; k < kGL; ++k) {
    const double phi = 2.0 * kPi * kGLx[k];
    per += kGLw[k] * 2.0 * kPi * std::hypot(a * std::sin(phi), b * std::cos(phi));
  }
  s.perimeter_ = per;
  return s;
}

BodyShape BodyShape::rounded_polygon(std::vector<Vec2> vertices, double rounding) {
  const size_t n = vertices.size();
  if (n < 3) throw GeometryError("rounded polygon needs at least 3 vertices");

  // enforce counter-clockwise orientation
  double twice_area = 0.0;
  for (size_t i = 0; i < n; ++i) twice_area += vertices[i].cross(vertices[(i + 1) % n]);
  if (std::abs(twice_area) < 1e-14) throw GeometryError("degenerate polygon (zero area)");
  if (twice_area < 0.0) std::reverse(vertices.begin(), vertices.end());

  // strict convexity (also guarantees simplicity)
  double min_edge = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& v0 = vertices[i];
    const Vec2& v1 = vertices[(i + 1) % n];
    const Vec2& v2 = vertices[(i + 2) % n];
    const Vec2 e0 = v1 - v0, e1 = v2 - v1;
    if (e0.cross(e1) <= 1e-12 * e0.norm() * e1.norm())
      throw GeometryError("polygon must be strictly convex (vertex " + std::to_string((i + 1) % n) +
                          ")");
    min_edge = std::min(min_edge, e0.norm());
  }

  BodyShape s;
  s.kind_ = Kind::RoundedPolygon;
  s.r_ = rounding < 0.0 ? 0.1 * min_edge : rounding;
  if (!(s.r_ > 0.0)) throw GeometryError("rounding radius must be positive");

  // Corner fillets: tangent length r*tan(psi/2) from each vertex, where psi is
  // the exterior turn angle; arc centers sit at distance r inside both edges.
  std::vector<double> tangent_len(n);
  std::vector<Vec2> t_in(n), t_out(n), centers(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& vp = vertices[(i + n - 1) % n];
    const Vec2& v = vertices[i];
    const Vec2& vn = vertices[(i + 1) % n];
    const Vec2 u_in = (v - vp) / (v - vp).norm();
    const Vec2 u_out = (vn - v) / (vn - v).norm();
    const double psi = std::atan2(u_in.cross(u_out), u_in.dot(u_out));  // in (0, pi)
    tangent_len[i] = s.r_ * std::tan(0.5 * psi);
    t_in[i] = v - u_in * tangent_len[i];
    t_out[i] = v + u_out * tangent_len[i];
    centers[i] = t_in[i] + s.r_ * u_in.perp();
  }
  for (size_t i = 0; i < n; ++i) {
    const double elen = (vertices[(i + 1) % n] - vertices[i]).norm();
    if (tangent_len[i] + tangent_len[(i + 1) % n] >= elen * (1.0 - 1e-9))
      throw GeometryError("rounding radius too large for edge " + std::to_string(i));
  }

  s.core_ = centers;
  for (size_t i = 0; i < n; ++i) {
    Piece arc;
    arc.is_arc = true;
    arc.center = centers[i];
    arc.p0 = t_in[i];
    arc.p1 = t_out[i];
    arc.ang0 = std::atan2(arc.p0.y - arc.center.y, arc.p0.x - arc.center.x);
    arc.ang1 = std::atan2(arc.p1.y - arc.center.y, arc.p1.x - arc.center.x);
    if (arc.ang1 <= arc.ang0) arc.ang1 += 2.0 * kPi;
    arc.len = s.r_ * (arc.ang1 - arc.ang0);
    s.pieces_.push_back(arc);

    Piece seg;
    seg.is_arc = false;
    seg.p0 = t_out[i];
    seg.p1 = t_in[(i + 1) % n];
    seg.len = (seg.p1 - seg.p0).norm();
    s.pieces_.push_back(seg);
  }
  s.finalize_polygon();
  return s;
}

void BodyShape::finalize_polygon() {
  perimeter_ = 0.0;
  for (const Piece& p : pieces_) perimeter_ += p.len;

  // Steiner: the shape is the Minkowski sum of the core polygon and a disk.
  const size_t n = core_.size();
  double core_area2 = 0.0, core_per = 0.0;
  for (size_t i = 0; i < n; ++i) {
    core_area2 += core_[i].cross(core_[(i + 1) % n]);
    core_per += (core_[(i + 1) % n] - core_[i]).norm();
  }
  area_ = 0.5 * core_area2 + r_ * core_per + kPi * r_ * r_;

  // Centroid by Green's theorem over the boundary, then recenter the shape so
  // the barycenter sits exactly at the origin.
  double cx_a = 0.0, cy_a = 0.0;  // integral of x^2/2 dy and -y^2/2 dx
  for (const Piece& p : pieces_) {
    for (int k = 0; k < kGL; ++k) {
      Vec2 pt, dp;  // point and d(point)/dt on the unit-parametrized piece
      if (p.is_arc) {
        const double ang = p.ang0 + (p.ang1 - p.ang0) * kGLx[k];
        pt = p.center + r_ * Vec2{std::cos(ang), std::sin(ang)};
        dp = r_ * (p.ang1 - p.ang0) * Vec2{-std::sin(ang), std::cos(ang)};
      } else {
        pt = p.p0 + (p.p1 - p.p0) * kGLx[k];
        dp = p.p1 - p.p0;
      }
      cx_a += kGLw[k] * 0.5 * pt.x * pt.x * dp.y;
      cy_a -= kGLw[k] * 0.5 * pt.y * pt.y * dp.x;
    }
  }
  const Vec2 centroid{cx_a / area_, cy_a / area_};
  for (Vec2& v : core_) v -= centroid;
  for (Piece& p : pieces_) {
    p.p0 -= centroid;
    p.p1 -= centroid;
    p.center -= centroid;
  }
}

CurvePoint BodyShape::boundary(double t) const {
  t -= std::floor(t);
  if (kind_ == Kind::Ellipse) {
    const double phi = 2.0 * kPi * t;
    const double c = std::cos(phi), sn = std::sin(phi);
    CurvePoint cp;
    cp.p = {a_ * c, b_ * sn};
    cp.d1 = 2.0 * kPi * Vec2{-a_ * sn, b_ * c};
    cp.d2 = 4.0 * kPi * kPi * Vec2{-a_ * c, -b_ * sn};
    return cp;
  }
  // arc-length parametrization over the pieces
  double s = t * perimeter_;
  size_t i = 0;
  while (i + 1 < pieces_.size() && s > pieces_[i].len) {
    s -= pieces_[i].len;
    ++i;
  }
  const Piece& p = pieces_[i];
  CurvePoint cp;
  if (p.is_arc) {
    const double ang = p.ang0 + s / r_;
    const double c = std::cos(ang), sn = std::sin(ang);
    cp.p = p.center + r_ * Vec2{c, sn};
    cp.d1 = perimeter_ * Vec2{-sn, c};
    cp.d2 = (perimeter_ * perimeter_ / r_) * Vec2{-c, -sn};
  } else {
    const Vec2 u = (p.p1 - p.p0) / p.len;
    cp.p = p.p0 + s * u;
    cp.d1 = perimeter_ * u;
    cp.d2 = {0.0, 0.0};
  }
  return cp;
}

namespace {

// Closest point on an axis-aligned ellipse (semi-axes a >= b) for a query in
// the closed first quadrant.  Robust bisection on the standard rational
// function; see the classic point-ellipse distance treatment.
Vec2 ellipse_closest_first_quadrant(double a, double b, double u, double v) {
  if (v > 0.0) {
    if (u > 0.0) {
      double t0 = -b * b + b * v;  // F(t0) >= 0
      double t1 = -b * b + std::hypot(a * u, b * v);
      auto F = [&](double t) {
        const double x = a * u / (t + a * a);
        const double y = b * v / (t + b * b);
        return x * x + y * y - 1.0;
      };
      while (F(t1) > 0.0) t1 += a * a;  // expand until bracketed
      for (int it = 0; it < 200 && t1 - t0 > 1e-17 * (std::abs(t0) + a * a); ++it) {
        const double tm = 0.5 * (t0 + t1);
        (F(tm) >= 0.0 ? t0 : t1) = tm;
      }
      const double t = 0.5 * (t0 + t1);
      return {a * a * u / (t + a * a), b * b * v / (t + b * b)};
    }
    return {0.0, b};
  }
  // v == 0: closest point may leave the axis when the query is deep inside
  if (u < (a * a - b * b) / a) {
    const double x = a * a * u / (a * a - b * b);
    return {x, b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)))};
  }
  return {a, 0.0};
}

}  // namespace

Vec2 BodyShape::closest_boundary_point_local(const Vec2& q) const {
  if (kind_ == Kind::Ellipse) {
    // reduce to the first quadrant; handle b > a by swapping coordinates
    double u = std::abs(q.x), v = std::abs(q.y);
    Vec2 c;
    if (a_ >= b_) {
      c = ellipse_closest_first_quadrant(a_, b_, u, v);
    } else {
      c = ellipse_closest_first_quadrant(b_, a_, v, u);
      c = {c.y, c.x};
    }
    return {std::copysign(c.x, q.x == 0.0 ? 1.0 : q.x), std::copysign(c.y, q.y == 0.0 ? 1.0 : q.y)};
  }

  // rounded polygon: project onto the core polygon, then push out by r
  const size_t n = core_.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_pt;
  size_t best_i = 0;
  for (size_t i = 0; i < n; ++i) {
    Vec2 c;
    const double d = point_segment_distance(q, core_[i], core_[(i + 1) % n], &c);
    if (d < best) {
      best = d;
      best_pt = c;
      best_i = i;
    }
  }
  Vec2 dir = q - best_pt;
  const double dn = dir.norm();
  bool inside_core = true;
  for (size_t i = 0; i < n && inside_core; ++i)
    inside_core = (core_[(i + 1) % n] - core_[i]).cross(q - core_[i]) >= 0.0;
  if (dn < 1e-14) {
    // on the core boundary: fall back to the edge's outward normal
    const Vec2 e = core_[(best_i + 1) % n] - core_[best_i];
    dir = Vec2{e.y, -e.x} / e.norm();
    return best_pt + r_ * dir;
  }
  if (inside_core) return best_pt + r_ * (best_pt - q) / dn;  // continue outward
  return best_pt + r_ * dir / dn;
}

double BodyShape::signed_distance_local(const Vec2& q) const {
  if (kind_ == Kind::Ellipse) {
    const Vec2 c = closest_boundary_point_local(q);
    const double d = (q - c).norm();
    const double level = (q.x / a_) * (q.x / a_) + (q.y / b_) * (q.y / b_);
    return level < 1.0 ? -d : d;
  }
  const size_t n = core_.size();
  double dmin = std::numeric_limits<double>::infinity();
  bool inside_core = true;
  for (size_t i = 0; i < n; ++i) {
    dmin = std::min(dmin, point_segment_distance(q, core_[i], core_[(i + 1) % n], nullptr));
    if ((core_[(i + 1) % n] - core_[i]).cross(q - core_[i]) < 0.0) inside_core = false;
  }
  const double sd_core = inside_core ? -dmin : dmin;
  return sd_core - r_;
}

double BodyShape::support(const Vec2& dir) const {
  const double dn = dir.norm();
  if (dn == 0.0) throw GeometryError("support direction must be nonzero");
  const Vec2 d = dir / dn;
  if (kind_ == Kind::Ellipse) return std::hypot(a_ * d.x, b_ * d.y);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& c : core_) best = std::max(best, c.dot(d));
  return best + r_;
}

double BodyShape::min_curvature_radius() const {
  if (kind_ == Kind::Ellipse) {
    const double lo = std::min(a_, b_), hi = std::max(a_, b_);
    return lo * lo / hi;
  }
  return r_;  // segments are flat, arcs all share the rounding radius
}

bool BodyShape::mirror_symmetric() const {
  if (kind_ == Kind::Ellipse) return true;
  double scale = 0.0;
  for (const Vec2& c : core_) scale = std::max({scale, std::abs(c.x), std::abs(c.y)});
  for (const Vec2& c : core_) {
    bool found = false;
    for (const Vec2& o : core_)
      if (std::abs(o.x - c.x) + std::abs(o.y + c.y) < 1e-9 * scale) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

Extents body_extents(const BodyShape& shape, double theta) {
  if (!(shape.area() > 0.0)) throw GeometryError("degenerate shape");
  // max over the rotated body of x.dir equals the body-frame support of the
  // counter-rotated direction
  Extents e;
  e.delta_t = shape.support(rotate({0.0, 1.0}, -theta));
  e.delta_b = shape.support(rotate({0.0, -1.0}, -theta));
  e.tau = std::max(shape.support(rotate({1.0, 0.0}, -theta)),
                   shape.support(rotate({-1.0, 0.0}, -theta)));
  return e;
}

Gaps gaps(const Channel& ch, const Extents& e, double h) {
  return {ch.H - e.delta_b + h, ch.H - e.delta_t - h};
}

bool is_admissible(const Channel& ch, const BodyShape& shape, const Placement& pl,
                   double margin) {
  if (margin < 0.0) throw GeometryError("margin must be nonnegative");
  const double right = shape.support(rotate({1.0, 0.0}, -pl.theta));
  const double left = shape.support(rotate({-1.0, 0.0}, -pl.theta));
  const double top = shape.support(rotate({0.0, 1.0}, -pl.theta)) + pl.h;
  const double bottom = shape.support(rotate({0.0, -1.0}, -pl.theta)) - pl.h;
  return right < ch.Lrect - margin && left < ch.Lrect - margin && top < ch.H - margin &&
         bottom < ch.H - margin;
}

double signed_distance(const BodyShape& shape, const Placement& pl, const Vec2& point) {
  return shape.signed_distance_local(to_body_frame(pl, point));
}

Vec2 closest_point(const BodyShape& shape, const Placement& pl, const Vec2& point) {
  return to_channel_frame(pl, shape.closest_boundary_point_local(to_body_frame(pl, point)));
}

}  // namespace cfsi

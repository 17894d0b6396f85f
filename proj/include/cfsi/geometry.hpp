#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfsi/vec.hpp"

namespace cfsi {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Channel cross-section (-Lrect, Lrect) x (-H, H), wider than tall.
struct Channel {
  double Lrect;
  double H;
  Channel(double Lrect_, double H_);
};

// Point on the body boundary together with its first two parameter derivatives.
struct CurvePoint {
  Vec2 p;
  Vec2 d1;
  Vec2 d2;
};

// Rigid body cross-section with a C^{1,1} boundary and barycenter at the
// origin.  Two families: ellipses, and convex polygons with circular-arc
// corner rounding.
class BodyShape {
 public:
  static BodyShape ellipse(double a, double b);
  // rounding < 0 means "default": 10% of the shortest edge.
  static BodyShape rounded_polygon(std::vector<Vec2> vertices, double rounding = -1.0);

  // Closed boundary curve, t in [0,1), positively oriented (fluid on the left
  // of the tangent is *outside* the body).
  CurvePoint boundary(double t) const;

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }

  // Euclidean signed distance in the body frame; negative inside.
  double signed_distance_local(const Vec2& q) const;
  Vec2 closest_boundary_point_local(const Vec2& q) const;

  // Support function max_{p in B} p.dir for unit-ish dir (exact, closed form).
  double support(const Vec2& dir) const;

  // True when the shape is mirror-symmetric about the x1-axis.
  bool mirror_symmetric() const;

  // Smallest radius of curvature along the boundary (mesh sizing needs it).
  double min_curvature_radius() const;

  bool is_ellipse() const { return kind_ == Kind::Ellipse; }
  double ellipse_a() const { return a_; }
  double ellipse_b() const { return b_; }

 private:
  BodyShape() = default;

  enum class Kind { Ellipse, RoundedPolygon };
  Kind kind_ = Kind::Ellipse;

  // ellipse semi-axes (a along x1, b along x2)
  double a_ = 0.0, b_ = 0.0;

  // rounded polygon: arcs of radius r_ around the vertices of an inward
  // offset ("core") polygon, joined by straight segments.
  struct Piece {
    bool is_arc = false;
    Vec2 p0, p1;       // endpoints, in orientation order
    Vec2 center;       // arc center (core vertex)
    double ang0 = 0.0; // arc start angle
    double ang1 = 0.0; // arc end angle   (ang1 > ang0, CCW sweep)
    double len = 0.0;  // piece arc length
  };
  std::vector<Vec2> core_;
  std::vector<Piece> pieces_;
  double r_ = 0.0;
  double perimeter_ = 0.0;
  double area_ = 0.0;

  void finalize_polygon();
};

struct Placement {
  double h = 0.0;
  double theta = 0.0;
};

struct Extents {
  double delta_b;  // -min x2 over the rotated boundary
  double delta_t;  //  max x2
  double tau;      //  max |x1|
};

struct Gaps {
  double eps_b;  // H - delta_b + h
  double eps_t;  // H - delta_t - h
};

Extents body_extents(const BodyShape& shape, double theta);
Gaps gaps(const Channel& ch, const Extents& e, double h);

// True iff every boundary point of the placed body is at distance > margin
// from the channel walls.
bool is_admissible(const Channel& ch, const BodyShape& shape, const Placement& pl,
                   double margin);

// Euclidean signed distance from a point (channel frame) to the placed body;
// negative inside the body.
double signed_distance(const BodyShape& shape, const Placement& pl, const Vec2& point);
Vec2 closest_point(const BodyShape& shape, const Placement& pl, const Vec2& point);

// Map between channel frame and body frame: placed body = { h e2 + R_theta x }.
inline Vec2 to_body_frame(const Placement& pl, const Vec2& p) {
  return rotate({p.x, p.y - pl.h}, -pl.theta);
}
inline Vec2 to_channel_frame(const Placement& pl, const Vec2& q) {
  Vec2 r = rotate(q, pl.theta);
  return {r.x, r.y + pl.h};
}

}  // namespace cfsi

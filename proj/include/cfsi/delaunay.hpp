#pragma once

#include <array>
#include <vector>

#include "cfsi/vec.hpp"

namespace cfsi {

// Robust orientation predicate: > 0 when (a,b,c) turn counter-clockwise.
// Double-precision filter with an exact rational fallback, so only the sign
// is guaranteed in the near-degenerate regime.
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// Robust in-circle predicate: > 0 when d lies strictly inside the circle
// through (a,b,c) given counter-clockwise (a,b,c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Delaunay triangulation of a duplicate-free point set; triangles are
// counter-clockwise triples of point indices.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts);

}  // namespace cfsi

#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsi/geometry.hpp"
#include "cfsi/vec.hpp"

namespace cfsi {

/// Raised when the generator cannot deliver a conforming mesh meeting the
/// quality floor (gap too tight for the point budget, lost boundary edge, ...).
struct MeshFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BTag { WallBottom, WallTop, WallLeft, WallRight, Body };

/// One boundary edge, ordered so the fluid sits on the left of a->b; the
/// outward normal (into the body, or out of the channel) is the right normal.
struct BoundaryEdge {
  int edge = -1;
  int a = -1, b = -1;
  int tri = -1;
  BTag tag = BTag::WallBottom;
};

/// Conforming triangle mesh of the channel with the body removed.  Edges are
/// globally indexed (sorted vertex pairs); tri_edges[t][i] is the edge
/// opposite corner i.  Midpoints back the quadratic geometry map: plain edge
/// midpoints everywhere except on-body edges, whose midpoints are projected
/// onto the curved boundary.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tris;  // counter-clockwise
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<int, 2>> edge_tris;  // second entry -1 on the boundary
  std::vector<Vec2> midpoints;
  std::vector<char> edge_on_body;
  std::vector<BoundaryEdge> boundary;
  double target_size = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
  // Quadratic scalar nodes: vertices first, then one node per edge.
  int n_p2_nodes() const { return n_vertices() + n_edges(); }
  std::array<int, 6> p2_nodes(int t) const {
    const auto& v = tris[t];
    const auto& e = tri_edges[t];
    const int nv = n_vertices();
    return {v[0], v[1], v[2], nv + e[0], nv + e[1], nv + e[2]};
  }
  Vec2 node_pos(int node) const {
    return node < n_vertices() ? vertices[node] : midpoints[node - n_vertices()];
  }
};

struct MeshOptions {
  double size = 0.12;        // far-field target edge length
  double body_refine = 4.0;  // extra refinement at the body: edge length <= size/body_refine
  double grading = 0.35;     // growth of local size with distance from body
  double gap_refine = 3.2;   // local size <= gap/gap_refine inside the gaps
  int relax_iters = 60;      // force-equilibration sweeps
  double min_angle_deg = 20; // quality floor enforced on the final mesh
  int max_points = 200000;   // budget guarding runaway gap refinement
};

/// Mesh the fluid region (channel minus placed body).
Mesh triangulate(const Channel& ch, const BodyShape& shape, const Placement& pl,
                 const MeshOptions& opts = {});

/// Mesh a mirror-symmetric configuration (h = 0, theta = 0, shape symmetric)
/// so that the vertex set is exactly closed under (x1, x2) -> (x1, -x2):
/// the upper half-domain is meshed with the symmetry line constrained, then
/// reflected with exact sign flips.
Mesh symmetrize(const Channel& ch, const BodyShape& shape, const Placement& pl,
                const MeshOptions& opts = {});

struct QualityReport {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;  // circumradius / (2 * inradius), 1 for equilateral
  double area_sum = 0.0;    // straight-sided triangle area total
  int n_vertices = 0, n_edges = 0, n_tris = 0, n_boundary_edges = 0;
  int euler_characteristic = 0;  // V - E + T: 0 with the body hole, else 1
};
QualityReport quality_report(const Mesh& m);

void dump_mesh(const Mesh& m, std::ostream& os);
Mesh load_mesh(std::istream& is);

}  // namespace cfsi

#pragma once

#include <array>
#include <vector>

#include "cfsi/mesh.hpp"
#include "cfsi/vec.hpp"

namespace cfsi::fem {

/// Quadratic scalar basis on the reference triangle (0,0)-(1,0)-(0,1):
/// values and reference gradients at (xi, eta).  Node order matches
/// Mesh::p2_nodes: three corners, then the mid-edge node opposite each
/// corner.  The linear basis is the barycentric triple.
void p2_basis(double xi, double eta, std::array<double, 6>& phi);
void p2_grads(double xi, double eta, std::array<Vec2, 6>& dphi);
void p1_basis(double xi, double eta, std::array<double, 3>& psi);

struct QPoint {
  double xi, eta;
  double w;  // includes the reference-triangle area: sum of w is 1/2
};
// Symmetric triangle rules, exact through polynomial degree 4 resp. 6.
const std::vector<QPoint>& quad_deg4();
const std::vector<QPoint>& quad_deg6();

struct EdgeQPoint {
  double s, w;  // on [0,1], weights summing to 1
};
// Gauss-Legendre on [0,1], exact through degree 7 (boundary integrals).
const std::vector<EdgeQPoint>& quad_edge();

// Quadratic shape functions restricted to an edge, s in [0,1]:
// ends and midpoint.  Shared by any edge trace (geometry and fields alike).
inline void edge_basis(double s, std::array<double, 3>& n) {
  n = {(1.0 - s) * (1.0 - 2.0 * s), 4.0 * s * (1.0 - s), s * (2.0 * s - 1.0)};
}
inline void edge_basis_d(double s, std::array<double, 3>& dn) {
  dn = {4.0 * s - 3.0, 4.0 - 8.0 * s, 4.0 * s - 1.0};
}

// Reference coordinates of a point on the reference edge opposite corner i,
// walked counter-clockwise (s=0 at corner (i+1)%3, s=1 at corner (i+2)%3).
Vec2 ref_edge_point(int i, double s);

/// Quadratic (isoparametric) geometry of one triangle; the mid-edge geometry
/// nodes coincide with chord midpoints except on body-curved edges.
class ElementMap {
 public:
  ElementMap(const Mesh& m, int t);

  bool curved() const { return curved_; }
  const std::array<int, 6>& nodes() const { return nodes_; }
  Vec2 map(double xi, double eta) const;
  Mat2 jacobian(double xi, double eta) const;  // rows: dx/d(xi,eta), dy/d(xi,eta)

  struct Sample {
    std::array<double, 6> phi;
    std::array<Vec2, 6> dphi;  // physical-space gradients
    std::array<double, 3> psi;
    Vec2 x;
    double jxw;  // |det J| * quadrature weight
  };
  Sample at(double xi, double eta, double w) const;

  // Inverse of the geometry map (Newton from the straight-sided inverse);
  // returns false if it fails to converge inside a loose reference bound.
  bool invert(const Vec2& x, Vec2& ref) const;

 private:
  std::array<Vec2, 6> X_;
  std::array<int, 6> nodes_;
  bool curved_ = false;
};

/// Uniform-grid point locator over the mesh triangles.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& m);
  // Returns the triangle containing p (reference coords in *ref), or -1.
  int locate(const Vec2& p, Vec2* ref = nullptr) const;

 private:
  const Mesh* mesh_;
  Vec2 lo_{}, hi_{};
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> bins_;
};

}  // namespace cfsi::fem

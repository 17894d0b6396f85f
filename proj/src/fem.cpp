/// Reference bases, quadrature tables, and the quadratic geometry map.

#include "cfsi/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfsi::fem {

void p2_basis(double xi, double eta, std::array<double, 6>& phi) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  phi[0] = l0 * (2.0 * l0 - 1.0);
  phi[1] = l1 * (2.0 * l1 - 1.0);
  phi[2] = l2 * (2.0 * l2 - 1.0);
  phi[3] = 4.0 * l1 * l2;
  phi[4] = 4.0 * l2 * l0;
  phi[5] = 4.0 * l0 * l1;
}

void p2_grads(double xi, double eta, std::array<Vec2, 6>& dphi) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  // dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1)
  dphi[0] = {-(4.0 * l0 - 1.0), -(4.0 * l0 - 1.0)};
  dphi[1] = {4.0 * l1 - 1.0, 0.0};
  dphi[2] = {0.0, 4.0 * l2 - 1.0};
  dphi[3] = {4.0 * l2, 4.0 * l1};
  dphi[4] = {-4.0 * l2, 4.0 * (l0 - l2)};
  dphi[5] = {4.0 * (l0 - l1), -4.0 * l1};
}

void p1_basis(double xi, double eta, std::array<double, 3>& psi) {
  psi = {1.0 - xi - eta, xi, eta};
}

namespace {

std::vector<QPoint> make_deg4() {
  // two symmetric orbits, 6 points
  const double w1 = 0.223381589678011, a1 = 0.108103018168070, b1 = 0.445948490915965;
  const double w2 = 0.109951743655322, a2 = 0.816847572980459, b2 = 0.091576213509771;
  std::vector<QPoint> q;
  auto orbit = [&](double w, double a, double b) {
    q.push_back({a, b, 0.5 * w});
    q.push_back({b, a, 0.5 * w});
    q.push_back({b, b, 0.5 * w});
  };
  orbit(w1, a1, b1);
  orbit(w2, a2, b2);
  return q;
}

std::vector<QPoint> make_deg6() {
  // two 3-point orbits and one 6-point orbit, 12 points
  const double w1 = 0.116786275726379, a1 = 0.501426509658179, b1 = 0.249286745170910;
  const double w2 = 0.050844906370207, a2 = 0.873821971016996, b2 = 0.063089014491502;
  const double w3 = 0.082851075618374, a3 = 0.053145049844817, b3 = 0.310352451033784;
  std::vector<QPoint> q;
  auto orbit3 = [&](double w, double a, double b) {
    q.push_back({a, b, 0.5 * w});
    q.push_back({b, a, 0.5 * w});
    q.push_back({b, b, 0.5 * w});
  };
  orbit3(w1, a1, b1);
  orbit3(w2, a2, b2);
  const double c3 = 1.0 - a3 - b3;
  const double pts[6][2] = {{a3, b3}, {b3, a3}, {a3, c3}, {c3, a3}, {b3, c3}, {c3, b3}};
  for (const auto& p : pts) q.push_back({p[0], p[1], 0.5 * w3});
  return q;
}

std::vector<EdgeQPoint> make_edge() {
  // 4-point Gauss-Legendre mapped to [0,1]
  const double x1 = 0.339981043584856, x2 = 0.861136311594053;
  const double w1 = 0.652145154862546, w2 = 0.347854845137454;
  return {{0.5 * (1.0 - x2), 0.5 * w2},
          {0.5 * (1.0 - x1), 0.5 * w1},
          {0.5 * (1.0 + x1), 0.5 * w1},
          {0.5 * (1.0 + x2), 0.5 * w2}};
}

}  // namespace

const std::vector<QPoint>& quad_deg4() {
  static const std::vector<QPoint> q = make_deg4();
  return q;
}
const std::vector<QPoint>& quad_deg6() {
  static const std::vector<QPoint> q = make_deg6();
  return q;
}
const std::vector<EdgeQPoint>& quad_edge() {
  static const std::vector<EdgeQPoint> q = make_edge();
  return q;
}

Vec2 ref_edge_point(int i, double s) {
  static const Vec2 corner[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  return corner[(i + 1) % 3] * (1.0 - s) + corner[(i + 2) % 3] * s;
}

ElementMap::ElementMap(const Mesh& m, int t) {
  nodes_ = m.p2_nodes(t);
  for (int i = 0; i < 6; ++i) X_[i] = m.node_pos(nodes_[i]);
  for (int i = 0; i < 3; ++i)
    if (m.edge_on_body[m.tri_edges[t][i]]) curved_ = true;
}

Vec2 ElementMap::map(double xi, double eta) const {
  std::array<double, 6> phi;
  p2_basis(xi, eta, phi);
  Vec2 x{0.0, 0.0};
  for (int i = 0; i < 6; ++i) x += X_[i] * phi[i];
  return x;
}

Mat2 ElementMap::jacobian(double xi, double eta) const {
  std::array<Vec2, 6> d;
  p2_grads(xi, eta, d);
  Mat2 j{0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    j.a11 += X_[i].x * d[i].x;
    j.a12 += X_[i].x * d[i].y;
    j.a21 += X_[i].y * d[i].x;
    j.a22 += X_[i].y * d[i].y;
  }
  return j;
}

ElementMap::Sample ElementMap::at(double xi, double eta, double w) const {
  Sample s;
  p2_basis(xi, eta, s.phi);
  p1_basis(xi, eta, s.psi);
  std::array<Vec2, 6> dref;
  p2_grads(xi, eta, dref);

  Mat2 j{0.0, 0.0, 0.0, 0.0};
  Vec2 x{0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    j.a11 += X_[i].x * dref[i].x;
    j.a12 += X_[i].x * dref[i].y;
    j.a21 += X_[i].y * dref[i].x;
    j.a22 += X_[i].y * dref[i].y;
    x += X_[i] * s.phi[i];
  }
  const double det = j.det();
  if (det <= 0.0) throw std::runtime_error("fem: non-positive jacobian");
  // grad_x phi = J^{-T} grad_ref phi
  const double inv = 1.0 / det;
  for (int i = 0; i < 6; ++i) {
    const Vec2 g = dref[i];
    s.dphi[i] = {(j.a22 * g.x - j.a21 * g.y) * inv, (-j.a12 * g.x + j.a11 * g.y) * inv};
  }
  s.x = x;
  s.jxw = det * w;
  return s;
}

bool ElementMap::invert(const Vec2& x, Vec2& ref) const {
  // affine initial guess from the corner triangle
  const Vec2 e1 = X_[1] - X_[0], e2 = X_[2] - X_[0], r = x - X_[0];
  const double det = e1.cross(e2);
  if (det == 0.0) return false;
  Vec2 q{(r.x * e2.y - r.y * e2.x) / det, (e1.x * r.y - e1.y * r.x) / det};
  if (!curved_) {
    ref = q;
    return true;
  }
  for (int it = 0; it < 25; ++it) {
    const Vec2 f = map(q.x, q.y) - x;
    if (std::abs(f.x) + std::abs(f.y) < 1e-13) break;
    const Mat2 j = jacobian(q.x, q.y);
    const double dj = j.det();
    if (dj == 0.0) return false;
    q -= Vec2{(j.a22 * f.x - j.a12 * f.y) / dj, (-j.a21 * f.x + j.a11 * f.y) / dj};
    if (q.x < -1.0 || q.y < -1.0 || q.x > 2.0 || q.y > 2.0) return false;
  }
  ref = q;
  return (map(q.x, q.y) - x).norm() < 1e-10;
}

MeshLocator::MeshLocator(const Mesh& m) : mesh_(&m) {
  lo_ = hi_ = m.vertices.at(0);
  for (const Vec2& v : m.vertices) {
    lo_.x = std::min(lo_.x, v.x);
    lo_.y = std::min(lo_.y, v.y);
    hi_.x = std::max(hi_.x, v.x);
    hi_.y = std::max(hi_.y, v.y);
  }
  const int n = std::max(1, static_cast<int>(std::sqrt(m.tris.size() / 2.0)));
  cell_ = std::max({(hi_.x - lo_.x) / n, (hi_.y - lo_.y) / n, 1e-12});
  nx_ = std::max(1, static_cast<int>(std::ceil((hi_.x - lo_.x) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((hi_.y - lo_.y) / cell_)));
  bins_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < m.n_tris(); ++t) {
    Vec2 tlo = m.vertices[m.tris[t][0]], thi = tlo;
    for (int i = 0; i < 6; ++i) {
      const Vec2 p = m.node_pos(m.p2_nodes(t)[i]);
      tlo.x = std::min(tlo.x, p.x);
      tlo.y = std::min(tlo.y, p.y);
      thi.x = std::max(thi.x, p.x);
      thi.y = std::max(thi.y, p.y);
    }
    const int x0 = std::clamp(static_cast<int>((tlo.x - lo_.x) / cell_), 0, nx_ - 1);
    const int x1 = std::clamp(static_cast<int>((thi.x - lo_.x) / cell_), 0, nx_ - 1);
    const int y0 = std::clamp(static_cast<int>((tlo.y - lo_.y) / cell_), 0, ny_ - 1);
    const int y1 = std::clamp(static_cast<int>((thi.y - lo_.y) / cell_), 0, ny_ - 1);
    for (int gy = y0; gy <= y1; ++gy)
      for (int gx = x0; gx <= x1; ++gx)
        bins_[static_cast<std::size_t>(gy) * nx_ + gx].push_back(t);
  }
}

int MeshLocator::locate(const Vec2& p, Vec2* ref) const {
  if (p.x < lo_.x - 1e-12 || p.x > hi_.x + 1e-12 || p.y < lo_.y - 1e-12 ||
      p.y > hi_.y + 1e-12)
    return -1;
  const int gx = std::clamp(static_cast<int>((p.x - lo_.x) / cell_), 0, nx_ - 1);
  const int gy = std::clamp(static_cast<int>((p.y - lo_.y) / cell_), 0, ny_ - 1);

  int best = -1;
  Vec2 best_ref{};
  double best_violation = 1e30;
  for (const int t : bins_[static_cast<std::size_t>(gy) * nx_ + gx]) {
    const ElementMap em(*mesh_, t);
    Vec2 q;
    if (!em.invert(p, q)) continue;
    const double viol = std::max({-q.x, -q.y, q.x + q.y - 1.0, 0.0});
    if (viol < best_violation) {
      best_violation = viol;
      best = t;
      best_ref = q;
    }
    if (viol == 0.0) break;
  }
  if (best < 0 || best_violation > 1e-9) return -1;
  if (ref) *ref = best_ref;
  return best;
}

}  // namespace cfsi::fem

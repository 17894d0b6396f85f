#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "cfsi/fem.hpp"
#include "cfsi/geometry.hpp"
#include "cfsi/mesh.hpp"

using namespace cfsi;
using namespace cfsi::fem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// exact reference-triangle integral of xi^a * eta^b
double mono_exact(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double mono_quad(const std::vector<QPoint>& q, int a, int b) {
  double s = 0.0;
  for (const auto& p : q) s += p.w * std::pow(p.xi, a) * std::pow(p.eta, b);
  return s;
}

}  // namespace

TEST_SUITE("fem") {

TEST_CASE("triangle rules integrate monomials exactly up to their degree") {
  for (int a = 0; a + 0 <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      CHECK(mono_quad(quad_deg4(), a, b) == doctest::Approx(mono_exact(a, b)).epsilon(1e-13));
  for (int a = 0; a + 0 <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b)
      CHECK(mono_quad(quad_deg6(), a, b) == doctest::Approx(mono_exact(a, b)).epsilon(1e-13));

  // edge rule: degree 7 on [0,1]
  for (int k = 0; k <= 7; ++k) {
    double s = 0.0;
    for (const auto& p : quad_edge()) s += p.w * std::pow(p.s, k);
    CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("quadratic basis: nodal deltas, partition of unity, gradient sum") {
  const Vec2 nodes[6] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}, {0, 0.5}, {0.5, 0}};
  for (int i = 0; i < 6; ++i) {
    std::array<double, 6> phi;
    p2_basis(nodes[i].x, nodes[i].y, phi);
    for (int j = 0; j < 6; ++j) CHECK(phi[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }

  std::mt19937_64 rng(3);
  auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int k = 0; k < 50; ++k) {
    double xi = u01(), eta = u01() * (1.0 - xi);
    std::array<double, 6> phi;
    std::array<Vec2, 6> dphi;
    std::array<double, 3> psi;
    p2_basis(xi, eta, phi);
    p2_grads(xi, eta, dphi);
    p1_basis(xi, eta, psi);
    double sp = 0.0, sx = 0.0, sy = 0.0, s1 = 0.0;
    for (int i = 0; i < 6; ++i) {
      sp += phi[i];
      sx += dphi[i].x;
      sy += dphi[i].y;
    }
    for (int i = 0; i < 3; ++i) s1 += psi[i];
    CHECK(sp == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sx == doctest::Approx(0.0).scale(1.0));
    CHECK(sy == doctest::Approx(0.0).scale(1.0));
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-14));

    // finite-difference check of the reference gradients
    const double h = 1e-6;
    std::array<double, 6> pxp, pxm, pyp, pym;
    p2_basis(xi + h, eta, pxp);
    p2_basis(xi - h, eta, pxm);
    p2_basis(xi, eta + h, pyp);
    p2_basis(xi, eta - h, pym);
    for (int i = 0; i < 6; ++i) {
      CHECK(dphi[i].x == doctest::Approx((pxp[i] - pxm[i]) / (2 * h)).epsilon(1e-6));
      CHECK(dphi[i].y == doctest::Approx((pyp[i] - pym[i]) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("element map reproduces affine geometry exactly") {
  const Channel ch(3.0, 1.0);
  const BodyShape body = BodyShape::ellipse(0.35, 0.2);
  MeshOptions opts;
  opts.size = 0.25;
  const Mesh m = triangulate(ch, body, {0.1, 0.0}, opts);

  int checked = 0;
  for (int t = 0; t < m.n_tris() && checked < 20; ++t) {
    ElementMap em(m, t);
    if (em.curved()) continue;
    ++checked;
    const auto& v = m.tris[t];
    const Vec2 a = m.vertices[v[0]], b = m.vertices[v[1]], c = m.vertices[v[2]];
    // corners and jacobian
    CHECK((em.map(0, 0) - a).norm() <= 1e-14);
    CHECK((em.map(1, 0) - b).norm() <= 1e-14);
    CHECK((em.map(0, 1) - c).norm() <= 1e-14);
    const Mat2 j = em.jacobian(0.3, 0.4);
    CHECK(j.a11 == doctest::Approx(b.x - a.x).epsilon(1e-13));
    CHECK(j.a21 == doctest::Approx(b.y - a.y).epsilon(1e-13));
    CHECK(j.a12 == doctest::Approx(c.x - a.x).epsilon(1e-13));
    CHECK(j.a22 == doctest::Approx(c.y - a.y).epsilon(1e-13));

    // physical gradient of a known linear function u = 3x - 2y
    const auto s = em.at(0.25, 0.5, 1.0);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
      const Vec2 p = m.node_pos(em.nodes()[i]);
      grad += s.dphi[i] * (3.0 * p.x - 2.0 * p.y);
    }
    CHECK(grad.x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(grad.y == doctest::Approx(-2.0).epsilon(1e-12));

    // jxw equals 2*area*w for straight triangles
    const double area = 0.5 * (b - a).cross(c - a);
    CHECK(s.jxw == doctest::Approx(2.0 * area * 1.0).epsilon(1e-13));
  }
  CHECK(checked == 20);
}

TEST_CASE("curved elements: midpoint interpolation and invertibility") {
  const Channel ch(3.0, 1.0);
  const BodyShape body = BodyShape::ellipse(0.35, 0.2);
  MeshOptions opts;
  opts.size = 0.2;
  const Mesh m = triangulate(ch, body, {0.15, 0.3}, opts);

  int n_curved = 0;
  for (int t = 0; t < m.n_tris(); ++t) {
    ElementMap em(m, t);
    if (!em.curved()) continue;
    ++n_curved;
    // the quadratic map hits all six geometry nodes
    const Vec2 ref[6] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}, {0, 0.5}, {0.5, 0}};
    for (int i = 0; i < 6; ++i)
      CHECK((em.map(ref[i].x, ref[i].y) - m.node_pos(em.nodes()[i])).norm() <= 1e-13);
    // positive jacobian across the quadrature points, and invert(map(q)) = q
    for (const auto& qp : quad_deg6()) {
      CHECK(em.jacobian(qp.xi, qp.eta).det() > 0.0);
      const Vec2 x = em.map(qp.xi, qp.eta);
      Vec2 q;
      REQUIRE(em.invert(x, q));
      CHECK((q - Vec2{qp.xi, qp.eta}).norm() <= 1e-9);
    }
  }
  CHECK(n_curved >= 8);
}

TEST_CASE("locator finds containing triangles everywhere in the fluid") {
  const Channel ch(3.0, 1.0);
  const BodyShape body = BodyShape::ellipse(0.35, 0.2);
  const Placement pl{0.1, 0.2};
  MeshOptions opts;
  opts.size = 0.2;
  const Mesh m = triangulate(ch, body, pl, opts);
  const MeshLocator loc(m);

  std::mt19937_64 rng(11);
  auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int found = 0, tried = 0;
  for (int k = 0; k < 500; ++k) {
    const Vec2 p{(u01() * 2 - 1) * ch.Lrect, (u01() * 2 - 1) * ch.H};
    const double sd = signed_distance(body, pl, p);
    if (sd < 0.05 && sd > -0.05) continue;  // skip the ambiguous curved band
    ++tried;
    Vec2 ref;
    const int t = loc.locate(p, &ref);
    if (sd < 0) {
      CHECK(t == -1);  // inside the body: no element
      continue;
    }
    REQUIRE(t >= 0);
    ++found;
    const ElementMap em(m, t);
    CHECK((em.map(ref.x, ref.y) - p).norm() <= 1e-9);
  }
  CHECK(found >= tried / 2);
  CHECK(loc.locate({100.0, 0.0}) == -1);

  // vertices themselves are located (boundary of reference simplex)
  for (int v = 0; v < m.n_vertices(); v += 17) {
    Vec2 ref;
    CHECK(loc.locate(m.vertices[v], &ref) >= 0);
  }
}

}  // TEST_SUITE

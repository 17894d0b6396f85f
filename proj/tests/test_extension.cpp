#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "cfsi/extension.hpp"

using namespace cfsi;

namespace {

// deterministic quasi-uniform points in a box (avoids implementation-defined
// std distributions)
struct PointGen {
  std::mt19937_64 rng;
  explicit PointGen(unsigned seed) : rng(seed) {}
  double unit() {
    // 53-bit mantissa mapping, identical across platforms
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  Vec2 in_box(const Vec2& lo, const Vec2& hi) {
    return {lo.x + (hi.x - lo.x) * unit(), lo.y + (hi.y - lo.y) * unit()};
  }
};

struct Setup {
  Channel ch{3.0, 1.0};
  BodyShape shape = BodyShape::ellipse(0.35, 0.2);
};

void check_gradient_consistency(const AnalyticField& f, const Channel& ch, unsigned seed) {
  PointGen gen(seed);
  const double step = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = gen.in_box({-ch.Lrect + 0.01, -ch.H + 0.01}, {ch.Lrect - 0.01, ch.H - 0.01});
    const VecSample s = f.eval(p);
    const Vec2 dx = (f.eval({p.x + step, p.y}).v - f.eval({p.x - step, p.y}).v) / (2.0 * step);
    const Vec2 dy = (f.eval({p.x, p.y + step}).v - f.eval({p.x, p.y - step}).v) / (2.0 * step);
    const double scale = 1.0 + std::abs(s.grad.a11) + std::abs(s.grad.a12) +
                         std::abs(s.grad.a21) + std::abs(s.grad.a22);
    CHECK(std::abs(dx.x - s.grad.a11) < 1e-5 * scale);
    CHECK(std::abs(dy.x - s.grad.a12) < 1e-5 * scale);
    CHECK(std::abs(dx.y - s.grad.a21) < 1e-5 * scale);
    CHECK(std::abs(dy.y - s.grad.a22) < 1e-5 * scale);
  }
}

void check_divergence_free(const AnalyticField& f, const Channel& ch, int n, unsigned seed) {
  PointGen gen(seed);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = gen.in_box({-ch.Lrect, -ch.H}, {ch.Lrect, ch.H});
    worst = std::max(worst, std::abs(f.divergence(p)));
  }
  CHECK(worst < 1e-10);
}

}  // namespace

TEST_SUITE("extension") {

TEST_CASE("cutoff blocks take the prescribed 0/1 values") {
  Setup s;
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  const Placement pl{0.1, 0.0};
  const Extents e = body_extents(s.shape, pl.theta);
  const Gaps g = gaps(s.ch, e, pl.h);
  const double tau = e.tau, H = s.ch.H, L = s.ch.Lrect, et = g.eps_t;

  const auto zl = cutoff(CutoffKind::ZetaL, prof, s.ch, s.shape, pl);
  const auto zr = cutoff(CutoffKind::ZetaR, prof, s.ch, s.shape, pl);

  PointGen gen(7);
  for (int i = 0; i < 2000; ++i) {
    // zeta_l == 1 on [-L,-2tau] x [-H,H], == 0 on [tau,L] x [-H,H]
    Vec2 p = gen.in_box({-L, -H}, {-2.0 * tau, H});
    CHECK(zl->eval(p).v == doctest::Approx(1.0).epsilon(1e-15));
    p = gen.in_box({tau, -H}, {L, H});
    CHECK(zl->eval(p).v == doctest::Approx(0.0).epsilon(1e-15));
    // zeta_r mirror blocks
    p = gen.in_box({2.0 * tau, -H}, {L, H});
    CHECK(zr->eval(p).v == doctest::Approx(1.0).epsilon(1e-15));
    p = gen.in_box({-L, -H}, {-tau, H - 0.5 * et});
    CHECK(zr->eval(p).v == doctest::Approx(0.0).epsilon(1e-15));
    // both vanish identically between the side ramps below the collar
    p = gen.in_box({-tau, -H}, {tau, H - 0.5 * et});
    CHECK(zl->eval(p).v == 0.0);
    CHECK(zr->eval(p).v == 0.0);
    // partition of unity on the top strip
    p = gen.in_box({-L, H - 0.25 * et}, {L, H});
    CHECK(zl->eval(p).v + zr->eval(p).v == doctest::Approx(1.0).epsilon(1e-14));
    // range [0,1]
    p = gen.in_box({-L, -H}, {L, H});
    CHECK(zl->eval(p).v >= 0.0);
    CHECK(zl->eval(p).v <= 1.0);
  }
  // 1D ramp sections: zeta_l on [-2tau,-tau] below the collar is x1-only
  const double v1 = zl->eval({-1.5 * tau, 0.0}).v;
  const double v2 = zl->eval({-1.5 * tau, -0.7}).v;
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-15));
  CHECK(v1 > 0.0);
  CHECK(v1 < 1.0);
}

TEST_CASE("chi equals one on the whole body boundary") {
  Setup s;
  const Placement pl{0.15, 0.3};
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  const auto chi = cutoff(CutoffKind::Chi, prof, s.ch, s.shape, pl);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p = to_channel_frame(pl, s.shape.boundary(i / 1000.0).p);
    const ScalarSample c = chi->eval(p);
    CHECK(c.v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(c.grad.x) < 1e-15);
    CHECK(std::abs(c.grad.y) < 1e-15);
  }
}

TEST_CASE("solenoidal extension: divergence vanishes identically") {
  Setup s;
  for (const Placement pl : {Placement{0.0, 0.0}, Placement{0.25, 0.2}, Placement{-0.3, 0.0}}) {
    const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
    const auto field = solenoidal_s(prof, s.ch, s.shape, pl, 0.05);
    check_divergence_free(*field, s.ch, 10000, 11);
  }
}

TEST_CASE("solenoidal extension: boundary traces (U=1 couette)") {
  Setup s;
  const double H = s.ch.H, L = s.ch.Lrect;
  const InflowProfile prof = InflowProfile::couette(1.0, H);
  const Placement pl{0.12, 0.25};
  const double lambda = 0.7;
  const auto field = solenoidal_s(prof, s.ch, s.shape, pl, lambda);

  for (int i = 0; i <= 1000; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    // left/right walls carry the in/out profiles
    const double x2 = -H + 2.0 * H * t;
    Vec2 v = field->eval({-L, x2}).v;
    CHECK(std::abs(v.x - lambda * prof.V_in(x2)) < 1e-10);
    CHECK(std::abs(v.y) < 1e-10);
    v = field->eval({L, x2}).v;
    CHECK(std::abs(v.x - lambda * prof.V_out(x2)) < 1e-10);
    CHECK(std::abs(v.y) < 1e-10);
    // top wall moves at lambda*U, bottom wall at rest
    const double x1 = -L + 2.0 * L * t;
    v = field->eval({x1, H}).v;
    CHECK(std::abs(v.x - lambda) < 1e-10);
    CHECK(std::abs(v.y) < 1e-10);
    v = field->eval({x1, -H}).v;
    CHECK(std::abs(v.x) < 1e-10);
    CHECK(std::abs(v.y) < 1e-10);
    // body at rest
    v = field->eval(to_channel_frame(pl, s.shape.boundary(t).p)).v;
    CHECK(std::abs(v.x) < 1e-10);
    CHECK(std::abs(v.y) < 1e-10);
  }
}

TEST_CASE("solenoidal extension: gradient consistency") {
  Setup s;
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  const auto field = solenoidal_s(prof, s.ch, s.shape, {0.1, 0.0}, 1.0);
  check_gradient_consistency(*field, s.ch, 23);
}

TEST_CASE("lambda scaling and lambda=0") {
  Setup s;
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  const auto f0 = solenoidal_s(prof, s.ch, s.shape, {0.0, 0.0}, 0.0);
  const auto f1 = solenoidal_s(prof, s.ch, s.shape, {0.0, 0.0}, 1.0);
  const auto f2 = solenoidal_s(prof, s.ch, s.shape, {0.0, 0.0}, 2.0);
  PointGen gen(3);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p = gen.in_box({-s.ch.Lrect, -s.ch.H}, {s.ch.Lrect, s.ch.H});
    CHECK(f0->eval(p).v.norm() == 0.0);
    CHECK((f2->eval(p).v - 2.0 * f1->eval(p).v).norm() < 1e-14);
  }
}

TEST_CASE("U=0 variants: traces on all boundary parts, h of both signs") {
  Setup s;
  const double H = s.ch.H, L = s.ch.Lrect;
  const InflowProfile prof = InflowProfile::poiseuille(1.0, H);
  const double lambda = 0.4;
  for (double h : {-0.25, 0.0, 0.3}) {
    const Placement pl{h, 0.0};
    const auto field = solenoidal_s(prof, s.ch, s.shape, pl, lambda);
    for (int i = 0; i <= 500; ++i) {
      const double t = static_cast<double>(i) / 500.0;
      const double x2 = -H + 2.0 * H * t;
      Vec2 v = field->eval({-L, x2}).v;
      CHECK(std::abs(v.x - lambda * prof.V_in(x2)) < 1e-10);
      CHECK(std::abs(v.y) < 1e-10);
      v = field->eval({L, x2}).v;
      CHECK(std::abs(v.x - lambda * prof.V_out(x2)) < 1e-10);
      CHECK(std::abs(v.y) < 1e-10);
      const double x1 = -L + 2.0 * L * t;
      for (double wall : {H, -H}) {
        v = field->eval({x1, wall}).v;
        CHECK(std::abs(v.x) < 1e-10);  // U = 0: both walls at rest
        CHECK(std::abs(v.y) < 1e-10);
      }
      v = field->eval(to_channel_frame(pl, s.shape.boundary(t).p)).v;
      CHECK(std::abs(v.x) < 1e-10);
      CHECK(std::abs(v.y) < 1e-10);
    }
    check_divergence_free(*field, s.ch, 3000, 31);
  }
  // layout switches exactly at h = 0
  CHECK(extension_layout(prof, s.ch, s.shape, {0.0, 0.0}).variant ==
        ExtensionLayout::Variant::TopCollar);
  CHECK(extension_layout(prof, s.ch, s.shape, {1e-9, 0.0}).variant ==
        ExtensionLayout::Variant::BottomCollar);
  // U=0, h<=0: collar gap is the *resting* top gap, independent of h
  CHECK(extension_layout(prof, s.ch, s.shape, {-0.3, 0.0}).collar_top ==
        extension_layout(prof, s.ch, s.shape, {0.0, 0.0}).collar_top);
}

TEST_CASE("symmetric variant: both walls move at lambda U") {
  Setup s;
  const double H = s.ch.H, L = s.ch.Lrect;
  const InflowProfile prof = InflowProfile::uniform(1.0, H);
  const double lambda = 0.3;
  for (double h : {0.0, 0.2}) {
    const Placement pl{h, 0.0};
    const auto field = symmetric_variant(prof, s.ch, s.shape, pl, lambda);
    for (int i = 0; i <= 500; ++i) {
      const double t = static_cast<double>(i) / 500.0;
      const double x1 = -L + 2.0 * L * t;
      for (double wall : {H, -H}) {
        const Vec2 v = field->eval({x1, wall}).v;
        CHECK(std::abs(v.x - lambda) < 1e-10);
        CHECK(std::abs(v.y) < 1e-10);
      }
      const double x2 = -H + 2.0 * H * t;
      Vec2 v = field->eval({-L, x2}).v;
      CHECK(std::abs(v.x - lambda * prof.V_in(x2)) < 1e-10);
      v = field->eval(to_channel_frame(pl, s.shape.boundary(t).p)).v;
      CHECK(std::abs(v.x) < 1e-10);
      CHECK(std::abs(v.y) < 1e-10);
    }
    check_divergence_free(*field, s.ch, 3000, 41);
  }
  // mode guard
  CHECK_THROWS_AS(
      symmetric_variant(InflowProfile::couette(1.0, H), s.ch, s.shape, {0.0, 0.0}, 0.1),
      ProfileError);
}

TEST_CASE("lift test field w: traces, divergence, support") {
  Setup s;
  const Placement pl{0.2, 0.15};
  const auto w = lift_field_w(s.ch, s.shape, pl);
  // w == e2 on the body boundary
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p = to_channel_frame(pl, s.shape.boundary(i / 1000.0).p);
    const Vec2 v = w->eval(p).v;
    CHECK(std::abs(v.x) < 1e-10);
    CHECK(std::abs(v.y - 1.0) < 1e-10);
  }
  // w == 0 on the channel boundary
  for (int i = 0; i <= 400; ++i) {
    const double t = static_cast<double>(i) / 400.0;
    const double x1 = -s.ch.Lrect + 2.0 * s.ch.Lrect * t;
    const double x2 = -s.ch.H + 2.0 * s.ch.H * t;
    for (const Vec2 p : {Vec2{x1, s.ch.H}, Vec2{x1, -s.ch.H}, Vec2{s.ch.Lrect, x2},
                         Vec2{-s.ch.Lrect, x2}}) {
      CHECK(w->eval(p).v.norm() == 0.0);
    }
  }
  check_divergence_free(*w, s.ch, 10000, 53);
  check_gradient_consistency(*w, s.ch, 59);
  // support box is honored
  Vec2 lo, hi;
  REQUIRE(w->support_box(lo, hi));
  PointGen gen(61);
  for (int i = 0; i < 2000; ++i) {
    Vec2 p = gen.in_box({-s.ch.Lrect, -s.ch.H}, {s.ch.Lrect, s.ch.H});
    if (p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y) {
      CHECK(w->eval(p).v.norm() == 0.0);
    }
  }
}

TEST_CASE("two collar widths give two valid w fields") {
  Setup s;
  const Placement pl{0.1, 0.0};
  for (double frac : {1.0, 0.5}) {
    const auto w = lift_field_w(s.ch, s.shape, pl, frac);
    for (int i = 0; i < 200; ++i) {
      const Vec2 p = to_channel_frame(pl, s.shape.boundary(i / 200.0).p);
      CHECK((w->eval(p).v - Vec2{0.0, 1.0}).norm() < 1e-10);
    }
    check_divergence_free(*w, s.ch, 2000, 67);
  }
}

TEST_CASE("collar scaling: sup |d2 zeta| * eps stays bounded") {
  Setup s;
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  const Extents e = body_extents(s.shape, 0.0);
  double bound = 0.0;
  bool first = true;
  for (double eps_t : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const double h = s.ch.H - e.delta_t - eps_t;
    const auto zl = cutoff(CutoffKind::ZetaL, prof, s.ch, s.shape, {h, 0.0});
    double sup = 0.0;
    PointGen gen(71);
    for (int i = 0; i < 4000; ++i) {
      const Vec2 p = gen.in_box({-2.0 * e.tau, s.ch.H - eps_t}, {2.0 * e.tau, s.ch.H});
      sup = std::max(sup, std::abs(zl->eval(p).grad.y));
    }
    const double scaled = sup * eps_t;
    if (first) {
      bound = 2.0 * scaled;
      first = false;
    }
    CHECK(scaled < bound + 1e-12);
    CHECK(scaled > 0.0);  // the derivative really does blow up ~ 1/eps
  }
}

TEST_CASE("degenerate placements are rejected") {
  Setup s;
  const InflowProfile prof = InflowProfile::couette(1.0, s.ch.H);
  // body sticking out of the channel
  CHECK_THROWS_AS(solenoidal_s(prof, s.ch, s.shape, {0.95, 0.0}, 0.1), GeometryError);
  // body too wide for the cut-off blocks
  const BodyShape wide = BodyShape::ellipse(1.8, 0.2);
  CHECK_THROWS_AS(solenoidal_s(prof, s.ch, wide, {0.0, 0.0}, 0.1), GeometryError);
  CHECK_THROWS_AS(lift_field_w(s.ch, s.shape, {0.95, 0.0}), GeometryError);
}

}  // TEST_SUITE

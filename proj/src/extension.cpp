#include "cfsi/extension.hpp"

#include <cmath>
#include <string>

namespace cfsi {

namespace {

// 1D value with two derivatives.
struct S1 {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

// Quintic smoothstep: C^2, flat (two vanishing derivatives) at both ends.
S1 smoothstep(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const double t2 = t * t, t3 = t2 * t;
  return {t3 * (10.0 - 15.0 * t + 6.0 * t2),
          30.0 * t2 * (1.0 - t) * (1.0 - t),
          60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)};
}

S1 ramp_up(double x, double x0, double x1) {
  const double inv = 1.0 / (x1 - x0);
  S1 q = smoothstep((x - x0) * inv);
  return {q.v, q.d1 * inv, q.d2 * inv * inv};
}

S1 ramp_down(double x, double x0, double x1) {
  S1 q = ramp_up(x, x0, x1);
  return {1.0 - q.v, -q.d1, -q.d2};
}

S1 mul(const S1& f, const S1& g) {
  return {f.v * g.v, f.d1 * g.v + f.v * g.d1, f.d2 * g.v + 2.0 * f.d1 * g.d1 + f.v * g.d2};
}

struct ZetaParams {
  double tau = 0.0, H = 0.0;
  double eps_top = 0.0;  // collar gap at the top wall, 0 = no top collar
  double eps_bot = 0.0;  // collar gap at the bottom wall, 0 = no bottom collar
};

// The cut-off pair.  Away from the collars, zeta_l/zeta_r are the 1D side
// ramps a_l (1 -> 0 over [-2tau,-tau]) and a_r (0 -> 1 over [tau,2tau]).
// Inside a collar the pair blends vertically to the complementary profiles
// (A, 1-A), A ramping 1 -> 0 across [-tau,tau], so that zeta_l + zeta_r = 1 on
// the wall strip while both vanish identically near the body.
class ZetaField final : public ScalarField {
 public:
  ZetaField(bool left, const ZetaParams& prm) : left_(left), prm_(prm) {}

  ScalarSample eval(const Vec2& p) const override {
    const double tau = prm_.tau, H = prm_.H;
    const S1 a = left_ ? ramp_down(p.x, -2.0 * tau, -tau) : ramp_up(p.x, tau, 2.0 * tau);
    S1 A = ramp_down(p.x, -tau, tau);
    if (!left_) A = S1{1.0 - A.v, -A.d1, -A.d2};

    S1 B{};  // vertical blend, supports at distinct walls never overlap
    if (prm_.eps_top > 0.0) {
      const S1 bt = ramp_up(p.y, H - 0.5 * prm_.eps_top, H - 0.25 * prm_.eps_top);
      B.v += bt.v;
      B.d1 += bt.d1;
      B.d2 += bt.d2;
    }
    if (prm_.eps_bot > 0.0) {
      const S1 bb = ramp_down(p.y, -H + 0.25 * prm_.eps_bot, -H + 0.5 * prm_.eps_bot);
      B.v += bb.v;
      B.d1 += bb.d1;
      B.d2 += bb.d2;
    }

    ScalarSample s;  // zeta = a + B (A - a)
    s.v = a.v + B.v * (A.v - a.v);
    s.grad.x = a.d1 + B.v * (A.d1 - a.d1);
    s.grad.y = B.d1 * (A.v - a.v);
    s.h11 = a.d2 + B.v * (A.d2 - a.d2);
    s.h12 = B.d1 * (A.d1 - a.d1);
    s.h22 = B.d2 * (A.v - a.v);
    return s;
  }

 private:
  bool left_;
  ZetaParams prm_;
};

// chi = X(x1) Y(x2): 1 on the body's bounding box, falling to 0 across the
// side strips [tau,2tau] and across collars of (scaled) half-gap width.
class ChiField final : public ScalarField {
 public:
  ChiField(double tau, double y_lo, double y_hi, double ramp_b, double ramp_t)
      : tau_(tau), y_lo_(y_lo), y_hi_(y_hi), ramp_b_(ramp_b), ramp_t_(ramp_t) {}

  ScalarSample eval(const Vec2& p) const override {
    const S1 X = x_profile(p.x);
    const S1 Y = y_profile(p.y);
    ScalarSample s;
    s.v = X.v * Y.v;
    s.grad = {X.d1 * Y.v, X.v * Y.d1};
    s.h11 = X.d2 * Y.v;
    s.h12 = X.d1 * Y.d1;
    s.h22 = X.v * Y.d2;
    return s;
  }

  S1 x_profile(double x) const {
    return mul(ramp_up(x, -2.0 * tau_, -tau_), ramp_down(x, tau_, 2.0 * tau_));
  }
  S1 y_profile(double y) const {
    return mul(ramp_up(y, y_lo_ - ramp_b_, y_lo_), ramp_down(y, y_hi_, y_hi_ + ramp_t_));
  }

  double tau_, y_lo_, y_hi_, ramp_b_, ramp_t_;
};

// s = -lambda grad^perp(zeta_l Phi_in + zeta_r Phi_out)   (potential from -H)
// or, reflected, +lambda grad^perp(zeta_l Psi_in + zeta_r Psi_out).
// Either way the divergence cancels identically, also in floating point.
class SolExtField final : public AnalyticField {
 public:
  SolExtField(const InflowProfile& profile, const ZetaParams& prm, double lambda, bool reflected)
      : profile_(profile), zl_(true, prm), zr_(false, prm), lambda_(lambda),
        reflected_(reflected) {}

  VecSample eval(const Vec2& p) const override {
    const ScalarSample zl = zl_.eval(p);
    const ScalarSample zr = zr_.eval(p);
    double Gi, Go, dGi, dGo, ddGi, ddGo;
    if (!reflected_) {
      Gi = profile_.Phi_in(p.y);
      Go = profile_.Phi_out(p.y);
      dGi = profile_.V_in(p.y);
      dGo = profile_.V_out(p.y);
      ddGi = profile_.dV_in(p.y);
      ddGo = profile_.dV_out(p.y);
    } else {
      Gi = profile_.Psi_in(p.y);
      Go = profile_.Psi_out(p.y);
      dGi = -profile_.V_in(p.y);
      dGo = -profile_.V_out(p.y);
      ddGi = -profile_.dV_in(p.y);
      ddGo = -profile_.dV_out(p.y);
    }
    // potential Q = zl Gi + zr Go and its first/second derivatives
    const double Q1 = zl.grad.x * Gi + zr.grad.x * Go;
    const double Q2 = zl.grad.y * Gi + zl.v * dGi + zr.grad.y * Go + zr.v * dGo;
    const double Q11 = zl.h11 * Gi + zr.h11 * Go;
    const double Q12 = zl.h12 * Gi + zl.grad.x * dGi + zr.h12 * Go + zr.grad.x * dGo;
    const double Q22 =
        zl.h22 * Gi + 2.0 * zl.grad.y * dGi + zl.v * ddGi + zr.h22 * Go + 2.0 * zr.grad.y * dGo +
        zr.v * ddGo;

    VecSample out;
    const double sgn = reflected_ ? -1.0 : 1.0;
    out.v = {sgn * lambda_ * Q2, -sgn * lambda_ * Q1};
    out.grad = {sgn * lambda_ * Q12, sgn * lambda_ * Q22,  //
                -sgn * lambda_ * Q11, -sgn * lambda_ * Q12};
    return out;
  }

 private:
  InflowProfile profile_;
  ZetaField zl_, zr_;
  double lambda_;
  bool reflected_;
};

// w = grad^perp(x1 chi) = (-x1 X Y', X Y + x1 X' Y)
class LiftWField final : public AnalyticField {
 public:
  explicit LiftWField(const ChiField& chi) : chi_(chi) {}

  VecSample eval(const Vec2& p) const override {
    const S1 X = chi_.x_profile(p.x);
    const S1 Y = chi_.y_profile(p.y);
    VecSample out;
    const double xXp = X.v + p.x * X.d1;  // d/dx1 (x1 X)
    out.v = {-p.x * X.v * Y.d1, xXp * Y.v};
    out.grad = {-xXp * Y.d1, -p.x * X.v * Y.d2,  //
                (2.0 * X.d1 + p.x * X.d2) * Y.v, xXp * Y.d1};
    return out;
  }

  bool support_box(Vec2& lo, Vec2& hi) const override {
    lo = {-2.0 * chi_.tau_, chi_.y_lo_ - chi_.ramp_b_};
    hi = {2.0 * chi_.tau_, chi_.y_hi_ + chi_.ramp_t_};
    return true;
  }

 private:
  ChiField chi_;
};

ZetaParams make_zeta_params(const ExtensionLayout& lay, const Channel& ch) {
  ZetaParams prm;
  prm.tau = lay.tau;
  prm.H = ch.H;
  prm.eps_top = lay.collar_top;
  prm.eps_bot = lay.collar_bottom;
  return prm;
}

void require_room(const Channel& ch, const BodyShape& shape, const Placement& pl, double tau) {
  if (!(2.0 * tau < ch.Lrect))
    throw GeometryError("cut-off construction needs 2*tau < Lrect (tau=" + std::to_string(tau) +
                        ", Lrect=" + std::to_string(ch.Lrect) + ")");
  if (!is_admissible(ch, shape, pl, 0.0))
    throw GeometryError("placement not admissible: body touches or leaves the channel");
}

}  // namespace

ExtensionLayout extension_layout(const InflowProfile& profile, const Channel& ch,
                                 const BodyShape& shape, const Placement& pl) {
  const Extents e = body_extents(shape, pl.theta);
  const Gaps g = gaps(ch, e, pl.h);
  ExtensionLayout lay;
  lay.tau = e.tau;
  if (profile.mode() == InflowProfile::Mode::Symmetric) {
    lay.variant = ExtensionLayout::Variant::BothCollars;
    lay.collar_top = g.eps_t;
    lay.collar_bottom = g.eps_b;
  } else if (profile.U() == 1.0) {
    lay.variant = ExtensionLayout::Variant::TopCollar;
    lay.collar_top = g.eps_t;
  } else if (pl.h <= 0.0) {
    // body at or below center: a fixed top collar keeps the field h-uniform
    lay.variant = ExtensionLayout::Variant::TopCollar;
    lay.collar_top = ch.H - e.delta_t;
  } else {
    // reflected construction with a fixed collar at the resting bottom gap
    lay.variant = ExtensionLayout::Variant::BottomCollar;
    lay.collar_bottom = ch.H - e.delta_b;
  }
  const double used = std::max(lay.collar_top, lay.collar_bottom);
  if (!(used > 0.0) ||
      (lay.variant == ExtensionLayout::Variant::BothCollars &&
       !(std::min(lay.collar_top, lay.collar_bottom) > 0.0)))
    throw GeometryError("collar gap degenerate: body touches a wall");
  return lay;
}

std::unique_ptr<ScalarField> cutoff(CutoffKind kind, const InflowProfile& profile,
                                    const Channel& ch, const BodyShape& shape, const Placement& pl,
                                    double collar_fraction) {
  const Extents e = body_extents(shape, pl.theta);
  require_room(ch, shape, pl, e.tau);
  if (kind == CutoffKind::Chi) {
    if (!(collar_fraction > 0.0 && collar_fraction <= 1.0))
      throw GeometryError("chi collar fraction must lie in (0, 1]");
    const Gaps g = gaps(ch, e, pl.h);
    if (!(g.eps_b > 0.0) || !(g.eps_t > 0.0))
      throw GeometryError("collar gap degenerate: body touches a wall");
    return std::make_unique<ChiField>(e.tau, pl.h - e.delta_b, pl.h + e.delta_t,
                                      0.5 * collar_fraction * g.eps_b,
                                      0.5 * collar_fraction * g.eps_t);
  }
  const ExtensionLayout lay = extension_layout(profile, ch, shape, pl);
  return std::make_unique<ZetaField>(kind == CutoffKind::ZetaL, make_zeta_params(lay, ch));
}

std::unique_ptr<AnalyticField> solenoidal_s(const InflowProfile& profile, const Channel& ch,
                                            const BodyShape& shape, const Placement& pl,
                                            double lambda) {
  if (lambda < 0.0) throw GeometryError("lambda must be nonnegative");
  const Extents e = body_extents(shape, pl.theta);
  require_room(ch, shape, pl, e.tau);
  const ExtensionLayout lay = extension_layout(profile, ch, shape, pl);
  const bool reflected = lay.variant == ExtensionLayout::Variant::BottomCollar;
  return std::make_unique<SolExtField>(profile, make_zeta_params(lay, ch), lambda, reflected);
}

std::unique_ptr<AnalyticField> lift_field_w(const Channel& ch, const BodyShape& shape,
                                            const Placement& pl, double collar_fraction) {
  const Extents e = body_extents(shape, pl.theta);
  require_room(ch, shape, pl, e.tau);
  if (!(collar_fraction > 0.0 && collar_fraction <= 1.0))
    throw GeometryError("w collar fraction must lie in (0, 1]");
  const Gaps g = gaps(ch, e, pl.h);
  if (!(g.eps_b > 0.0) || !(g.eps_t > 0.0))
    throw GeometryError("collar gap degenerate: body touches a wall");
  ChiField chi(e.tau, pl.h - e.delta_b, pl.h + e.delta_t, 0.5 * collar_fraction * g.eps_b,
               0.5 * collar_fraction * g.eps_t);
  return std::make_unique<LiftWField>(chi);
}

std::unique_ptr<AnalyticField> symmetric_variant(const InflowProfile& profile, const Channel& ch,
                                                 const BodyShape& shape, const Placement& pl,
                                                 double lambda) {
  if (profile.mode() != InflowProfile::Mode::Symmetric)
    throw ProfileError("symmetric extension requires a symmetric-mode profile");
  return solenoidal_s(profile, ch, shape, pl, lambda);
}

}  // namespace cfsi

#pragma once

#include <memory>

#include "cfsi/geometry.hpp"
#include "cfsi/profiles.hpp"

namespace cfsi {

// Scalar C^2 field sample: value, gradient, symmetric Hessian.
struct ScalarSample {
  double v = 0.0;
  Vec2 grad{};
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual ScalarSample eval(const Vec2& p) const = 0;
};

// Vector field sample; grad rows are components, columns are derivatives:
// grad = [[d1 v1, d2 v1], [d1 v2, d2 v2]].
struct VecSample {
  Vec2 v{};
  Mat2 grad{};
};

class AnalyticField {
 public:
  virtual ~AnalyticField() = default;
  virtual VecSample eval(const Vec2& p) const = 0;
  double divergence(const Vec2& p) const {
    const VecSample s = eval(p);
    return s.grad.a11 + s.grad.a22;
  }
  // Axis-aligned support box; returns false when the field has full support.
  virtual bool support_box(Vec2& /*lo*/, Vec2& /*hi*/) const { return false; }
};

enum class CutoffKind { ZetaL, ZetaR, Chi };

// Which wall carries the blending collar of the cut-off pair.  The choice
// depends on the boundary data: a moving top wall needs the collar at the
// top; with both walls at rest and the body shifted upwards the construction
// is reflected; the symmetric configuration blends at both walls.
struct ExtensionLayout {
  enum class Variant { TopCollar, BottomCollar, BothCollars };
  Variant variant;
  double collar_top = 0.0;     // gap used for the top collar (0 if unused)
  double collar_bottom = 0.0;  // gap used for the bottom collar (0 if unused)
  double tau = 0.0;
};

ExtensionLayout extension_layout(const InflowProfile& profile, const Channel& ch,
                                 const BodyShape& shape, const Placement& pl);

// The cut-off scalar fields: the pair (zeta_l, zeta_r) driving the boundary
// extension, or the plateau function chi driving the lift test field.  For
// Chi, `collar_fraction` scales the ramp widths (1 = half-gap collars).
std::unique_ptr<ScalarField> cutoff(CutoffKind kind, const InflowProfile& profile,
                                    const Channel& ch, const BodyShape& shape,
                                    const Placement& pl, double collar_fraction = 1.0);

// Divergence-free extension of the inflow boundary data, scaled by lambda.
// Profiles in symmetric mode are routed to the both-collar construction.
std::unique_ptr<AnalyticField> solenoidal_s(const InflowProfile& profile, const Channel& ch,
                                            const BodyShape& shape, const Placement& pl,
                                            double lambda);

// Divergence-free field equal to e2 on the body boundary and 0 on the channel
// walls; supported on a plateau box around the body plus two collars.
std::unique_ptr<AnalyticField> lift_field_w(const Channel& ch, const BodyShape& shape,
                                            const Placement& pl, double collar_fraction = 1.0);

// Both-collar construction for the symmetric configuration (both walls moving
// at U, even profiles).
std::unique_ptr<AnalyticField> symmetric_variant(const InflowProfile& profile, const Channel& ch,
                                                 const BodyShape& shape, const Placement& pl,
                                                 double lambda);

}  // namespace cfsi

#include "cfsi/profiles.hpp"

#include <cmath>
#include <string>

namespace cfsi {

double Poly::operator()(double x) const {
  double r = 0.0;
  for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({0.0});
  std::vector<double> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
  std::vector<double> a(c_.size() + 1, 0.0);
  for (size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
  return Poly(std::move(a));
}

double Poly::definite_integral(double a, double b) const {
  const Poly F = antiderivative();
  return F(b) - F(a);
}

bool Poly::even_in(double) const {
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  for (size_t i = 1; i < c_.size(); i += 2)
    if (std::abs(c_[i]) > 1e-14 * std::max(1.0, scale)) return false;
  return true;
}

InflowProfile::InflowProfile(Poly v_in, Poly v_out, double U, double H, Mode mode)
    : v_in_(std::move(v_in)),
      v_out_(std::move(v_out)),
      U_(U),
      H_(H),
      mode_(mode) {
  if (!(H > 0.0)) throw ProfileError("profile requires H > 0");
  if (U != 0.0 && U != 1.0) throw ProfileError("top-wall speed U must be 0 or 1");
  dv_in_ = v_in_.derivative();
  dv_out_ = v_out_.derivative();
  iv_in_ = v_in_.antiderivative();
  iv_out_ = v_out_.antiderivative();

  const double tol = 1e-10;
  auto check = [&](double got, double want, const char* what) {
    if (std::abs(got - want) > tol)
      throw ProfileError(std::string("profile violates matching condition ") + what + ": got " +
                         std::to_string(got) + ", want " + std::to_string(want));
  };
  if (mode == Mode::Standard) {
    check(v_in_(-H), 0.0, "V_in(-H)=0");
    check(v_out_(-H), 0.0, "V_out(-H)=0");
    check(v_in_(H), U, "V_in(H)=U");
    check(v_out_(H), U, "V_out(H)=U");
  } else {
    check(v_in_(-H), U, "V_in(-H)=U");
    check(v_out_(-H), U, "V_out(-H)=U");
    check(v_in_(H), U, "V_in(H)=U");
    check(v_out_(H), U, "V_out(H)=U");
    if (!v_in_.even_in(H) || !v_out_.even_in(H))
      throw ProfileError("symmetric mode requires even profiles");
  }
  const double fin = v_in_.definite_integral(-H, H);
  const double fout = v_out_.definite_integral(-H, H);
  if (std::abs(fin - fout) > tol)
    throw ProfileError("profile violates flux compatibility: inflow " + std::to_string(fin) +
                       " vs outflow " + std::to_string(fout));
  flux_ = fin;
}

InflowProfile InflowProfile::couette(double U, double H) {
  // U (x2 + H) / (2H)
  Poly v({U / 2.0, U / (2.0 * H)});
  return InflowProfile(v, v, U, H, Mode::Standard);
}

InflowProfile InflowProfile::poiseuille(double vmax, double H) {
  Poly v({vmax, 0.0, -vmax / (H * H)});
  return InflowProfile(v, v, 0.0, H, Mode::Standard);
}

InflowProfile InflowProfile::uniform(double U, double H) {
  Poly v({U});
  return InflowProfile(v, v, U, H, Mode::Symmetric);
}

InflowProfile InflowProfile::polynomial(Poly v_in, Poly v_out, double U, double H, Mode mode) {
  return InflowProfile(std::move(v_in), std::move(v_out), U, H, mode);
}

int InflowProfile::max_degree() const {
  return std::max(v_in_.degree(), v_out_.degree());
}

}  // namespace cfsi

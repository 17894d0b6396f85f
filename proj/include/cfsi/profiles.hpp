#pragma once

#include <stdexcept>
#include <vector>

namespace cfsi {

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense univariate polynomial, c[i] * x^i.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  double operator()(double x) const;
  Poly derivative() const;
  Poly antiderivative() const;  // constant term 0
  double definite_integral(double a, double b) const;
  int degree() const { return c_.empty() ? 0 : static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  bool even_in(double) const;  // p(x) == p(-x) up to roundoff in the coefficients

 private:
  std::vector<double> c_;
};

// Inlet/outlet data V_in, V_out on x2 in [-H, H], with the top-wall speed U.
//
// Two flavors of matching conditions:
//   Standard:   V(-H) = 0,  V(H) = U        (moving top wall only)
//   Symmetric:  V(-H) = V(H) = U, V even    (both walls move at U)
// plus flux compatibility  int V_in = int V_out  in either flavor.
class InflowProfile {
 public:
  enum class Mode { Standard, Symmetric };

  // V(x2) = U (x2+H)/(2H) on both sides; standard mode.
  static InflowProfile couette(double U, double H);
  // V(x2) = vmax (1 - (x2/H)^2) on both sides; standard mode with U = 0.
  static InflowProfile poiseuille(double vmax, double H);
  // V(x2) = U on both sides; symmetric mode (plug flow between moving walls).
  static InflowProfile uniform(double U, double H);
  // arbitrary polynomial pair; matching conditions validated for `mode`.
  static InflowProfile polynomial(Poly v_in, Poly v_out, double U, double H, Mode mode);

  double V_in(double x2) const { return v_in_(x2); }
  double V_out(double x2) const { return v_out_(x2); }
  double dV_in(double x2) const { return dv_in_(x2); }
  double dV_out(double x2) const { return dv_out_(x2); }

  // Phi(x2) = int_{-H}^{x2} V, Psi(x2) = int_{x2}^{H} V = flux - Phi
  double Phi_in(double x2) const { return iv_in_(x2) - iv_in_(-H_); }
  double Phi_out(double x2) const { return iv_out_(x2) - iv_out_(-H_); }
  double Psi_in(double x2) const { return flux() - Phi_in(x2); }
  double Psi_out(double x2) const { return flux() - Phi_out(x2); }

  double flux() const { return flux_; }
  double U() const { return U_; }
  double H() const { return H_; }
  Mode mode() const { return mode_; }
  int max_degree() const;

 private:
  InflowProfile(Poly v_in, Poly v_out, double U, double H, Mode mode);

  Poly v_in_, v_out_, dv_in_, dv_out_, iv_in_, iv_out_;
  double U_ = 0.0, H_ = 0.0, flux_ = 0.0;
  Mode mode_ = Mode::Standard;
};

}  // namespace cfsi

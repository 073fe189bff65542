#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torusns/field.hpp"

namespace torusns {

using ScalarFunc = std::function<double(double)>;

/// Lower bounds certified for a viscosity pair: infima of mu, mu + 2 s mu',
/// lambda, lambda + r lambda' over the scan domain.
struct EllipticityConstants {
  double eps_mu_1 = 0.0;
  double eps_mu_2 = 0.0;
  double eps_lambda_1 = 0.0;
  double eps_lambda_2 = 0.0;

  double eps_mu() const { return eps_mu_1 < eps_mu_2 ? eps_mu_1 : eps_mu_2; }
  bool admissible() const {
    return eps_mu_1 > 0.0 && eps_mu_2 > 0.0 &&
           2.0 * eps_mu_1 + 3.0 * eps_lambda_1 > 0.0 &&
           2.0 * eps_mu() + 3.0 * eps_lambda_2 > 0.0;
  }
};

struct CertifyReport {
  bool passed = false;
  EllipticityConstants constants;
  std::string violation;  // names the failed inequality; empty on pass
  double witness = 0.0;   // sample point at which the infimum is attained
  double mu_c1_error = 0.0;      // finite-difference consistency of mu'
  double lambda_c1_error = 0.0;  // and of lambda'
};

/// Shear/bulk viscosity pair (mu, lambda) with stored derivatives and the
/// rectangle [0, s_max] x [-r_max, r_max] over which conditions are
/// certified. Immutable after construction apart from the cached constants.
class ConstitutiveLaw {
 public:
  ConstitutiveLaw(std::string name, ScalarFunc mu, ScalarFunc mu_prime, ScalarFunc lambda,
                  ScalarFunc lambda_prime, double s_max = 4.0, double r_max = 4.0);

  double mu(double s) const { return mu_(s); }
  double mu_prime(double s) const { return mu_prime_(s); }
  double lambda(double r) const { return lambda_(r); }
  double lambda_prime(double r) const { return lambda_prime_(r); }

  double s_max() const { return s_max_; }
  double r_max() const { return r_max_; }
  const std::string& name() const { return name_; }

  bool certified() const { return constants_.has_value() && constants_->admissible(); }
  const EllipticityConstants& constants() const;

 private:
  friend CertifyReport certify(ConstitutiveLaw& law, int n_samples);
  std::string name_;
  ScalarFunc mu_, mu_prime_, lambda_, lambda_prime_;
  double s_max_, r_max_;
  std::optional<EllipticityConstants> constants_;
};

/// Scans the four ellipticity quantities over a uniform grid plus midpoint
/// refinement and fills the law's constants. Fails (with the violated
/// inequality and witnessing sample) when the certified infima are not
/// admissible. The report never claims anything outside the scan domain.
CertifyReport certify(ConstitutiveLaw& law, int n_samples = 2048);

/// Pointwise stress on a small matrix: S = 2 mu(|Du|^2) Du + lambda(div u) div u I.
/// Du is row-major d x d.
std::array<double, 9> stress(const ConstitutiveLaw& law, const std::array<double, 9>& Du,
                             double divu, int d);

/// S(u) as a matrix field: sym_grad/div spectrally, law applied pointwise,
/// result dealiased.
TorusField stress_field(const ConstitutiveLaw& law, const TorusField& u);

/// div S(u) through the expanded chain rule:
///   2 mu div Du + 4 mu' (sum_i <d_i Du, Du> (Du)_i) + (lambda + lambda' div u) grad div u.
/// Throws ResolutionError when u is not band-limited to the dealias band.
TorusField div_stress(const ConstitutiveLaw& law, const TorusField& u);

/// Geometric pieces of the chain rule, shared by div_stress and the
/// fixed-point right side of the nonlinear elliptic solver.
struct StressParts {
  TorusField Du;        // sym grad
  TorusField divu;      // scalar
  TorusField s;         // |Du|^2 samples
  TorusField chain;     // sum_i <d_i Du, Du> (Du)_i
  TorusField div_Du;    // vector
  TorusField grad_div;  // vector
};

StressParts stress_parts(const TorusField& u);

/// int_Omega [ int_0^{|Du|^2} mu + 1/2 int_0^{|div u|^2} lambda ] dx; the
/// antiderivatives use adaptive Gauss-Kronrod quadrature at abs tol 1e-12.
double dissipation_potential(const ConstitutiveLaw& law, const TorusField& u);

struct CoercivityGap {
  double J = 0.0;      // int (S u - S v) : grad(u - v)
  double bound = 0.0;  // eps_mu |grad w|^2 + (eps_mu + eps_lambda_2) |div w|^2
};

/// Monotonicity gap of the stress operator between two velocity fields;
/// J >= bound holds for certified laws (up to quadrature round-off).
CoercivityGap coercivity_gap(const ConstitutiveLaw& law, const TorusField& u,
                             const TorusField& v);

/// Barotropic pressure p(rho) with derivative; p >= 0 on rho >= 0.
struct PressureLaw {
  std::string name = "constant";
  ScalarFunc p;
  ScalarFunc p_prime;
};

TorusField pressure_of(const PressureLaw& pl, const TorusField& rho);

/// Registry construction. Known law names:
///   newtonian: mu, lambda
///   power_law: mu0, coef, exponent, lambda0, lambda_slope
///   p_delta:   delta, p (p >= 4; mu(s) = delta + s^((p-2)/2))
///   table:     monotone-cubic interpolation of (s, mu(s)) samples; lambda0
struct LawSpec {
  std::string name = "newtonian";
  std::map<std::string, double> params;
  std::vector<std::pair<double, double>> table;  // for name == "table"
  double s_max = 4.0;
  double r_max = 4.0;
};

ConstitutiveLaw make_law(const LawSpec& spec);

/// Known pressure names: constant (value), linear (K), gamma (K, gamma >= 1).
struct PressureSpec {
  std::string name = "linear";
  std::map<std::string, double> params;
};

PressureLaw make_pressure(const PressureSpec& spec);

}  // namespace torusns

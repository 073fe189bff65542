#pragma once

#include <string>
#include <vector>

#include "torusns/constitutive.hpp"
#include "torusns/field.hpp"
#include "torusns/lame.hpp"

namespace torusns {

struct EstimateCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool informative = false;  // reported without a pass/fail meaning
};

struct EllipticSolveReport {
  TorusField u;
  int iterations = 0;
  double residual_l2 = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  std::vector<double> diff_history;  // ||u_{m} - u_{m-1}||_L2 per accepted iterate
  std::vector<EstimateCheck> estimate_checks;
};

/// Smallness quantities of the fixed-point route: 1/mu(s) <= c s^(alpha/2),
/// kappa = C_{p,lb} sup |lb - (lambda + lambda' tr)/(2 mu)| and the
/// contraction number delta = C_{p,lb} sup |2 mu' s| / mu.
struct SmallnessCertificate {
  double alpha = 0.0;
  double c = 0.0;
  double kappa = 0.0;
  double delta_contraction = 0.0;
  bool certified = false;
};

/// lambda_bar = lambda(0) / (2 mu(0)), clipped above -1/2; exact for
/// Newtonian laws, a sensible default otherwise.
LameParameter default_lame_parameter(const ConstitutiveLaw& law);

/// Solves -div S u = f by the damped fixed point
///   u_{m+1} = solve_lame(param, -f/(2 mu) - ((lambda + lambda' div u)/(2 mu)
///             - lambda_bar) grad div u - (2 mu'/mu) chain(u)),
/// nonlinear terms dealiased, right side mean-projected. Requires a
/// certified law and zero-mean f.
EllipticSolveReport solve(const ConstitutiveLaw& law, const LameParameter& param,
                          const TorusField& f, double tol = 1e-11, int max_iter = 200);

/// Scans s in [0, field_bound^2] and traces in [-sqrt(d) fb, sqrt(d) fb].
SmallnessCertificate certify_smallness(const ConstitutiveLaw& law, const LameParameter& param,
                                       double p, double field_bound, int d = 3,
                                       int n_samples = 2048);

struct EstimateResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool informative = false;
};

/// Exact solver for the reduced 1D problem -(mu(|u'|^2) u')' = f: spectral
/// antiderivative of f plus pointwise monotone inversion of t -> mu(t^2) t.
TorusField solve_1d(const ConstitutiveLaw& law, const TorusField& f);

/// Checks int |u''|^p <= (eps_mu_2)^(1-p) int |f|^p on the 1D solve.
EstimateResult verify_1d_estimate(const ConstitutiveLaw& law, const TorusField& f, double p,
                                  TorusField* u_out = nullptr);

/// Checks (eps_mu/2)||grad Du||^2 + eps_lambda_2 ||grad div u||^2
///   <= ||f||^2/(2 eps_mu). Marked informative (not pass/fail) when
/// eps_lambda_2 < 0, where the printed inequality presumes a sign.
EstimateResult verify_h2_estimate(const ConstitutiveLaw& law, const TorusField& f,
                                  const EllipticSolveReport& report);

}  // namespace torusns

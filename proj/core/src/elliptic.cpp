#include "torusns/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

LameParameter default_lame_parameter(const ConstitutiveLaw& law) {
  LameParameter p;
  p.lambda_bar = std::max(law.lambda(0.0) / (2.0 * law.mu(0.0)), -0.5 + 1e-6);
  return p;
}

namespace {

double residual_norm(const ConstitutiveLaw& law, const TorusField& u, const TorusField& f) {
  return norm_l2(div_stress(law, u) + f);
}

// -f/(2 mu) - ((lambda + lambda' div u)/(2 mu) - lambda_bar) grad div u
// - (2 mu'/mu) chain(u), dealiased and mean-projected.
TorusField fixed_point_rhs(const ConstitutiveLaw& law, const LameParameter& param,
                           const TorusField& u, const TorusField& f) {
  const TorusGrid& g = u.grid();
  const int d = g.d;
  const std::size_t np = g.points();
  const StressParts parts = stress_parts(u);
  auto sv = parts.s.values(0);
  auto dv = parts.divu.values(0);

  TorusField rhs(g, Rank::Vector);
  for (int j = 0; j < d; ++j) {
    auto dst = rhs.values_mut(j);
    auto fv = f.values(j);
    auto gd = parts.grad_div.values(j);
    auto ch = parts.chain.values(j);
    for (std::size_t m = 0; m < np; ++m) {
      const double mu = law.mu(sv[m]);
      const double lam_comb = law.lambda(dv[m]) + law.lambda_prime(dv[m]) * dv[m];
      dst[m] = -fv[m] / (2.0 * mu) - (lam_comb / (2.0 * mu) - param.lambda_bar) * gd[m] -
               (2.0 * law.mu_prime(sv[m]) / mu) * ch[m];
    }
  }
  return project_zero_mean(dealias(rhs));
}

}  // namespace

EllipticSolveReport solve(const ConstitutiveLaw& law, const LameParameter& param,
                          const TorusField& f, double tol, int max_iter) {
  param.validate();
  if (!law.certified()) throw Error("elliptic solve: law '" + law.name() + "' is not certified");
  if (f.rank() != Rank::Vector) throw std::invalid_argument("elliptic solve: vector f expected");

  EllipticSolveReport rep;
  const double fn = norm_l2(f);
  if (fn == 0.0) {
    rep.u = TorusField(f.grid(), Rank::Vector);
    rep.iterations = 1;
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    return rep;
  }

  const double mu0 = law.mu(0.0);
  TorusField u = solve_lame(param, project_zero_mean(dealias(f * (-1.0 / (2.0 * mu0)))));
  double res = residual_norm(law, u, f);
  rep.residual_history.push_back(res);

  double theta = 1.0;
  int m = 1;
  for (; m <= max_iter; ++m) {
    if (res <= tol * fn) {
      rep.converged = true;
      break;
    }
    const TorusField target = solve_lame(param, fixed_point_rhs(law, param, u, f));
    TorusField candidate = u * (1.0 - theta) + target * theta;
    double cand_res = residual_norm(law, candidate, f);
    if (cand_res > res && theta > 1.0 / 16.0) {
      theta = std::max(theta / 2.0, 1.0 / 16.0);
      candidate = u * (1.0 - theta) + target * theta;
      cand_res = residual_norm(law, candidate, f);
    }
    rep.diff_history.push_back(norm_l2(candidate - u));
    u = std::move(candidate);
    res = cand_res;
    rep.residual_history.push_back(res);
  }
  rep.u = std::move(u);
  rep.iterations = std::min(m, max_iter);
  rep.residual_l2 = res;
  return rep;
}

SmallnessCertificate certify_smallness(const ConstitutiveLaw& law, const LameParameter& param,
                                       double p, double field_bound, int d, int n_samples) {
  param.validate();
  SmallnessCertificate cert;
  const double C = riesz_constants(p, d, param).C_total;
  const double s_hi = field_bound * field_bound;

  double mu_min = law.mu(0.0);
  double contraction_sup = 0.0;
  for (int i = 0; i <= n_samples; ++i) {
    const double s = s_hi * i / n_samples;
    mu_min = std::min(mu_min, law.mu(s));
    if (s > 0.0)
      contraction_sup = std::max(contraction_sup, std::abs(2.0 * law.mu_prime(s) * s) / law.mu(s));
  }
  cert.delta_contraction = C * contraction_sup;

  bool alpha_ok = mu_min > 0.0;
  if (alpha_ok) {
    cert.alpha = 0.0;
    cert.c = 1.0 / mu_min;
  } else {
    cert.alpha = 1.0;  // marker: no admissible (alpha, c) pair on the scan
    cert.c = std::numeric_limits<double>::infinity();
  }

  // sup over symmetric S with |S|^2 <= field_bound^2; the trace obeys
  // |tr S| <= sqrt(d) |S|.
  const double tr_hi = std::sqrt(static_cast<double>(d)) * field_bound;
  double mismatch_sup = 0.0;
  const int nt = 256;
  for (int i = 0; i <= n_samples; ++i) {
    const double s = s_hi * i / n_samples;
    const double tr_bound = std::sqrt(static_cast<double>(d) * s);
    for (int j = -nt; j <= nt; ++j) {
      const double tr = tr_hi * j / nt;
      if (std::abs(tr) > tr_bound + 1e-15) continue;
      const double val = std::abs(param.lambda_bar -
                                  (law.lambda(tr) + law.lambda_prime(tr) * tr) /
                                      (2.0 * law.mu(s)));
      mismatch_sup = std::max(mismatch_sup, val);
    }
  }
  cert.kappa = C * mismatch_sup;
  cert.certified = alpha_ok && cert.kappa <= 1.0 && cert.delta_contraction < 1.0;
  return cert;
}

TorusField solve_1d(const ConstitutiveLaw& law, const TorusField& f) {
  const TorusGrid& g = f.grid();
  if (g.d != 1 || f.rank() != Rank::Scalar)
    throw std::invalid_argument("solve_1d: scalar field on T^1 expected");
  {
    auto fc = f.coeffs(0);
    double maxmag = 0.0;
    for (auto z : fc) maxmag = std::max(maxmag, std::abs(z));
    if (std::abs(fc[0]) > 1e-12 * (1.0 + maxmag))
      throw NonZeroMeanError("solve_1d: right side must have zero mean");
  }

  // F' = f with zero mean, spectrally
  TorusField F(g, Rank::Scalar);
  {
    auto src = f.coeffs(0);
    auto dst = F.coeffs_mut(0);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
      dst[flat] = (k[0] == 0 || k[0] == g.nyquist())
                      ? 0.0
                      : src[flat] / std::complex<double>(0.0, k[0]);
    });
  }

  const auto psi = [&law](double t) { return law.mu(t * t) * t; };
  const auto psi_prime = [&law](double t) {
    return law.mu(t * t) + 2.0 * t * t * law.mu_prime(t * t);
  };
  // pointwise inversion of psi (strictly increasing for elliptic laws)
  const auto psi_inv = [&](double y) {
    double t = y / law.mu(0.0);
    for (int it = 0; it < 100; ++it) {
      const double r = psi(t) - y;
      if (std::abs(r) <= 1e-15 * (1.0 + std::abs(y))) break;
      const double dp = psi_prime(t);
      double step = r / dp;
      // safeguard against overshooting in strongly shear-thickening laws
      if (std::abs(step) > 1.0 + std::abs(t)) step = std::copysign(1.0 + std::abs(t), step);
      t -= step;
    }
    return t;
  };

  auto Fv = F.values(0);
  const std::size_t np = g.points();
  const auto mean_uprime = [&](double w0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) acc += psi_inv(w0 - Fv[i]);
    return acc / static_cast<double>(np);
  };

  // bracketed secant/bisection for the unique w0 with mean(u') = 0
  double lo = Fv[0], hi = Fv[0];
  for (std::size_t i = 1; i < np; ++i) {
    lo = std::min(lo, Fv[i]);
    hi = std::max(hi, Fv[i]);
  }
  lo -= 1.0 + psi(1.0);
  hi += 1.0 + psi(1.0);
  double glo = mean_uprime(lo), ghi = mean_uprime(hi);
  while (glo > 0.0) {
    lo -= (hi - lo);
    glo = mean_uprime(lo);
  }
  while (ghi < 0.0) {
    hi += (hi - lo);
    ghi = mean_uprime(hi);
  }
  double w0 = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gm = mean_uprime(w0);
    if (std::abs(gm) <= 1e-15 * (1.0 + std::abs(w0)) || hi - lo <= 1e-16 * (1.0 + std::abs(w0)))
      break;
    if (gm > 0.0) {
      hi = w0;
    } else {
      lo = w0;
    }
    w0 = 0.5 * (lo + hi);
  }

  TorusField uprime(g, Rank::Scalar);
  {
    auto dst = uprime.values_mut(0);
    for (std::size_t i = 0; i < np; ++i) dst[i] = psi_inv(w0 - Fv[i]);
  }
  uprime.set_zero_mean(true);  // projects the bisection remainder

  TorusField u(g, Rank::Scalar);
  {
    auto src = uprime.coeffs(0);
    auto dst = u.coeffs_mut(0);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
      dst[flat] = (k[0] == 0 || k[0] == g.nyquist())
                      ? 0.0
                      : src[flat] / std::complex<double>(0.0, k[0]);
    });
  }
  return u;
}

EstimateResult verify_1d_estimate(const ConstitutiveLaw& law, const TorusField& f, double p,
                                  TorusField* u_out) {
  if (!law.certified()) throw Error("verify_1d_estimate: law must be certified first");
  const TorusField u = solve_1d(law, f);
  const TorusField upp = laplacian(u);  // d=1: u''
  EstimateResult res;
  res.lhs = std::pow(norm_lq(upp, p), p);
  const double eps2 = law.constants().eps_mu_2;
  res.rhs = std::pow(eps2, 1.0 - p) * std::pow(norm_lq(f, p), p);
  res.satisfied = res.lhs <= res.rhs * (1.0 + 1e-8);
  if (u_out) *u_out = u;
  return res;
}

EstimateResult verify_h2_estimate(const ConstitutiveLaw& law, const TorusField& f,
                                  const EllipticSolveReport& report) {
  if (!report.converged) throw ConvergenceError("verify_h2_estimate: solve did not converge");
  const EllipticityConstants& eps = law.constants();
  const TorusField Du = sym_grad(report.u);
  const double gDu = norm_l2(grad(Du));
  const double gdiv = norm_l2(grad(divergence(report.u)));
  EstimateResult res;
  res.lhs = 0.5 * eps.eps_mu() * gDu * gDu + eps.eps_lambda_2 * gdiv * gdiv;
  res.rhs = norm_l2(f);
  res.rhs = res.rhs * res.rhs / (2.0 * eps.eps_mu());
  res.informative = eps.eps_lambda_2 < 0.0;
  res.satisfied = res.informative || res.lhs <= res.rhs * (1.0 + 1e-8);
  return res;
}

}  // namespace torusns

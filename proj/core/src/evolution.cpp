#include "torusns/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("step: t_end must be positive");
  if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
    throw std::invalid_argument("step: cfl_safety must lie in (0, 1]");
}

int StepConfig::steps() const {
  const int m = static_cast<int>(std::llround(t_end / dt));
  return std::max(m, 1);
}

TorusField FieldSeries::at_time(double t) const {
  if (fields_.empty()) throw std::logic_error("FieldSeries: empty");
  if (fields_.size() == 1) return fields_.front();
  const double s = (t - t0_) / step_;
  const auto nearest = static_cast<std::ptrdiff_t>(std::llround(s));
  if (nearest >= 0 && static_cast<std::size_t>(nearest) < fields_.size() &&
      std::abs(s - static_cast<double>(nearest)) < 1e-9)
    return fields_[static_cast<std::size_t>(nearest)];

  // cubic Lagrange over 4 nearest nodes, window clamped to the range
  std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(s)) - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(fields_.size()) - 4);
  if (fields_.size() < 4) i0 = 0;
  const std::size_t nw = std::min<std::size_t>(4, fields_.size());

  TorusField out(fields_.front().grid(), fields_.front().rank());
  for (std::size_t a = 0; a < nw; ++a) {
    const double xa = static_cast<double>(i0 + static_cast<std::ptrdiff_t>(a));
    double w = 1.0;
    for (std::size_t b = 0; b < nw; ++b) {
      if (a == b) continue;
      const double xb = static_cast<double>(i0 + static_cast<std::ptrdiff_t>(b));
      w *= (s - xb) / (xa - xb);
    }
    out += fields_[static_cast<std::size_t>(i0) + a] * w;
  }
  return out;
}

void FieldSeries::truncate(std::size_t new_size) {
  if (new_size < fields_.size()) fields_.resize(new_size);
}

namespace {

// advective CFL for the spectral RK4 stage
void check_cfl(const TorusField& u, double dt, double safety) {
  const double umax = u.max_abs();
  const double kmax = u.grid().nyquist();
  if (dt * umax * kmax > 2.8 * safety)
    throw CflError("advective CFL bound violated (dt*|u|*k_max too large)");
}

}  // namespace

FieldSeries transport_stage(const TorusField& rho0, const TimeField& u_prev,
                            const StepConfig& cfg) {
  cfg.validate();
  if (rho0.rank() != Rank::Scalar)
    throw std::invalid_argument("transport: scalar density expected");
  const TorusGrid& g = rho0.grid();
  const double h = 0.5 * cfg.dt;
  const int nsub = 2 * cfg.steps();

  const double mass0 = integral(rho0);
  const double rho_scale = 1.0 + norm_linf(rho0);

  // RHS(rho; u) = -(u . grad rho) - rho div u with dealiased products
  const auto rhs = [&g](const TorusField& rho, const TorusField& u) {
    const TorusField grad_rho = grad(rho);
    const TorusField divu = divergence(u);
    const std::size_t np = g.points();
    TorusField out(g, Rank::Scalar);
    auto dst = out.values_mut(0);
    auto rv = rho.values(0);
    auto dv = divu.values(0);
    for (int j = 0; j < g.d; ++j) {
      auto uv = u.values(j);
      auto gr = grad_rho.values(j);
      for (std::size_t m = 0; m < np; ++m) dst[m] -= uv[m] * gr[m];
    }
    for (std::size_t m = 0; m < np; ++m) dst[m] -= rv[m] * dv[m];
    return dealias(out);
  };

  FieldSeries series(0.0, h);
  TorusField rho = dealias(rho0);
  series.push(rho);

  for (int m = 0; m < nsub; ++m) {
    const double t = m * h;
    const TorusField u_a = dealias(u_prev(t));
    const TorusField u_b = dealias(u_prev(t + 0.5 * h));
    const TorusField u_c = dealias(u_prev(t + h));
    check_cfl(u_a, h, cfg.cfl_safety);

    const TorusField k1 = rhs(rho, u_a);
    const TorusField k2 = rhs(rho + k1 * (0.5 * h), u_b);
    const TorusField k3 = rhs(rho + k2 * (0.5 * h), u_b);
    const TorusField k4 = rhs(rho + k3 * h, u_c);
    rho += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);

    const double mass = integral(rho);
    if (std::abs(mass - mass0) > 1e-8 * std::max(std::abs(mass0), 1e-30))
      throw Error("transport: mass drift beyond 1e-8 relative");
    double rho_min = rho.values(0)[0];
    for (double v : rho.values(0)) rho_min = std::min(rho_min, v);
    if (rho_min < -cfg.negativity_tol * rho_scale)
      throw NegativeDensityError("transport: density undershoot beyond tolerance");
    series.push(rho);
  }
  return series;
}

namespace {

// A0 = -(2 mu0 div D + lambda0 grad div): symbol mu0|k|^2 on the k-orthogonal
// part and (2 mu0 + lambda0)|k|^2 along k. SPD for certified laws.
TorusField apply_a0(const TorusField& u, double mu0, double lambda0) {
  const TorusGrid& g = u.grid();
  const int d = g.d;
  TorusField out(g, Rank::Vector);
  std::vector<std::span<const std::complex<double>>> uc(d);
  std::vector<std::span<std::complex<double>>> oc(d);
  for (int c = 0; c < d; ++c) uc[c] = u.coeffs(c);
  for (int c = 0; c < d; ++c) oc[c] = out.coeffs_mut(c);
  const double a_par = 2.0 * mu0 + lambda0;
  detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
    double k2 = 0.0;
    for (int j = 0; j < d; ++j) k2 += static_cast<double>(k[j]) * k[j];
    if (k2 == 0.0) {
      for (int c = 0; c < d; ++c) oc[c][flat] = 0.0;
      return;
    }
    std::complex<double> kdotu(0.0, 0.0);
    for (int j = 0; j < d; ++j) kdotu += static_cast<double>(k[j]) * uc[j][flat];
    for (int c = 0; c < d; ++c) {
      const std::complex<double> par = kdotu * (static_cast<double>(k[c]) / k2);
      oc[c][flat] = k2 * (mu0 * (uc[c][flat] - par) + a_par * par);
    }
  });
  return out;
}

TorusField apply_precond(const TorusField& r, double rho_bar, double tau, double mu0,
                         double lambda0) {
  const TorusGrid& g = r.grid();
  const int d = g.d;
  TorusField out(g, Rank::Vector);
  std::vector<std::span<const std::complex<double>>> rc(d);
  std::vector<std::span<std::complex<double>>> oc(d);
  for (int c = 0; c < d; ++c) rc[c] = r.coeffs(c);
  for (int c = 0; c < d; ++c) oc[c] = out.coeffs_mut(c);
  const double a_par = 2.0 * mu0 + lambda0;
  detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
    double k2 = 0.0;
    for (int j = 0; j < d; ++j) k2 += static_cast<double>(k[j]) * k[j];
    if (k2 == 0.0) {
      for (int c = 0; c < d; ++c) oc[c][flat] = rc[c][flat] / rho_bar;
      return;
    }
    std::complex<double> kdotr(0.0, 0.0);
    for (int j = 0; j < d; ++j) kdotr += static_cast<double>(k[j]) * rc[j][flat];
    for (int c = 0; c < d; ++c) {
      const std::complex<double> par = kdotr * (static_cast<double>(k[c]) / k2);
      oc[c][flat] = (rc[c][flat] - par) / (rho_bar + tau * mu0 * k2) +
                    par / (rho_bar + tau * a_par * k2);
    }
  });
  return out;
}

struct ImplicitOperator {
  const TorusField* rho = nullptr;  // midpoint density samples
  double tau = 0.0;
  double mu0 = 0.0;
  double lambda0 = 0.0;
  double rho_bar = 0.0;

  TorusField apply(const TorusField& v) const {
    return dealias(multiply(*rho, v)) + apply_a0(v, mu0, lambda0) * tau;
  }
  TorusField precond(const TorusField& r) const {
    return apply_precond(r, rho_bar, tau, mu0, lambda0);
  }
};

// Preconditioned CG on the band-limited subspace.
TorusField solve_implicit(const ImplicitOperator& op, const TorusField& b, const TorusField& x0,
                          double tol, int max_iter, int* iterations) {
  TorusField x = dealias(x0);
  TorusField r = b - op.apply(x);
  const double bnorm = norm_l2(b);
  const double target = tol * std::max(bnorm, 1e-300);
  if (norm_l2(r) <= target) {
    if (iterations) *iterations = 0;
    return x;
  }
  TorusField z = op.precond(r);
  TorusField p = z;
  double rz = inner_l2(r, z);
  int it = 0;
  for (; it < max_iter; ++it) {
    const TorusField Ap = op.apply(p);
    const double pAp = inner_l2(p, Ap);
    if (!(pAp > 0.0)) throw ConvergenceError("momentum: implicit operator lost positivity");
    const double alpha = rz / pAp;
    x += p * alpha;
    r -= Ap * alpha;
    if (norm_l2(r) <= target) {
      ++it;
      break;
    }
    z = op.precond(r);
    const double rz_new = inner_l2(r, z);
    p = z + p * (rz_new / rz);
    rz = rz_new;
  }
  if (norm_l2(r) > target)
    throw ConvergenceError("momentum: implicit CG failed to reach tolerance");
  if (iterations) *iterations = it;
  return x;
}

}  // namespace

MomentumStageResult momentum_stage(const ConstitutiveLaw& law, const PressureLaw& pressure,
                                   const FieldSeries& rho_half, const TimeField& u_prev,
                                   const TorusField& u0, const TimeField& forcing,
                                   const StepConfig& cfg) {
  cfg.validate();
  if (!law.certified()) throw Error("momentum: law must be certified");
  const TorusGrid& g = u0.grid();
  const double dt = cfg.dt;
  const int nsteps = cfg.steps();
  const double mu0 = law.mu(0.0);
  const double lambda0 = law.lambda(0.0);

  MomentumStageResult out;
  out.u = FieldSeries(0.0, dt);
  TorusField u = dealias(u0);
  out.u.push(u);
  out.t_last = 0.0;

  // N(v) = div S v - L0 v (explicit nonlinear stress remainder)
  const auto stress_remainder = [&](const TorusField& v) {
    return div_stress(law, v) + apply_a0(v, mu0, lambda0);
  };
  // E(v, t) = rho f - rho (u_prev . grad) v - grad p(rho)
  const auto explicit_terms = [&](const TorusField& v, double t, const TorusField& rho_mid,
                                  const TorusField& grad_p) {
    const TorusField up = dealias(u_prev(t));
    check_cfl(up, dt, cfg.cfl_safety);
    const TorusField conv = dealias(contract_matrix_vector(grad(v), up));
    TorusField e = dealias(multiply(rho_mid, dealias(forcing(t)) - conv)) - grad_p;
    return e;
  };

  for (int m = 0; m < nsteps; ++m) {
    const double t = m * dt;
    const double t_half = t + 0.5 * dt;
    const TorusField& rho_mid = rho_half[2 * m + 1];
    const double rho_bar = rho_mid.mean(0);
    if (!(rho_bar > 0.0)) throw Error("momentum: mean density must be positive");

    const TorusField grad_p = grad(dealias(pressure_of(pressure, rho_mid)));

    ImplicitOperator op;
    op.rho = &rho_mid;
    op.tau = 0.5 * dt;
    op.mu0 = mu0;
    op.lambda0 = lambda0;
    op.rho_bar = rho_bar;

    const TorusField rho_u = dealias(multiply(rho_mid, u));

    // predictor: half backward-Euler step to the midpoint
    int its = 0;
    const TorusField rhs_pred =
        rho_u + (stress_remainder(u) + explicit_terms(u, t, rho_mid, grad_p)) * (0.5 * dt);
    const TorusField u_star =
        solve_implicit(op, rhs_pred, u, cfg.implicit_tol, cfg.implicit_max_iter, &its);
    out.max_cg_iterations = std::max(out.max_cg_iterations, its);

    // corrector: Crank-Nicolson on L0, midpoint-explicit remainder
    const TorusField expl = stress_remainder(u_star) + explicit_terms(u_star, t_half, rho_mid, grad_p);
    const TorusField rhs_corr = rho_u - apply_a0(u, mu0, lambda0) * (0.5 * dt) + expl * dt;
    TorusField u_next =
        solve_implicit(op, rhs_corr, u_star, cfg.implicit_tol, cfg.implicit_max_iter, &its);
    out.max_cg_iterations = std::max(out.max_cg_iterations, its);

    // discrete residual of the step equation
    {
      const TorusField resid = dealias(multiply(rho_mid, u_next - u)) * (1.0 / dt) +
                               apply_a0(u_next + u, mu0, lambda0) * 0.5 - expl;
      out.step_residuals.push_back(norm_l2(resid));
    }

    u = std::move(u_next);
    out.u.push(u);
    out.t_last = t + dt;
    if (cfg.watch && !cfg.watch(out.t_last, u)) {
      out.truncated = true;
      break;
    }
  }
  return out;
}

}  // namespace torusns

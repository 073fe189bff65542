#include "torusns/monitors.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "torusns/norms.hpp"
#include "torusns/ops.hpp"

namespace torusns {

namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

TorusField sqrt_rho_weighted(const TorusField& rho, const TorusField& w) {
  TorusField out(w.grid(), w.rank());
  auto rv = rho.values(0);
  const std::size_t np = w.npoints();
  for (int c = 0; c < w.ncomp(); ++c) {
    auto src = w.values(c);
    auto dst = out.values_mut(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] = std::sqrt(std::max(rv[i], 0.0)) * src[i];
  }
  return out;
}

}  // namespace

bool AprioriRecord::finite() const {
  return all_finite({phi, phi_sup, rho_w1q0, rho_t_lq0, rho_t_l2, u_h1, u_h2, grad_u_l2,
                     sqrt_rho_ut_l2, rho_ut_sq, int_u_w2q0_sq, int_ut_h1_sq, I, energy_kinetic,
                     dissipation_rate, work_rate, mass, rho_min});
}

TorusField rho_t_identity(const TorusField& rho, const TorusField& u) {
  const TorusGrid& g = rho.grid();
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
}

AprioriRecord apriori_snapshot(const TorusField& rho, const TorusField& u, const TorusField& u_t,
                               double q0) {
  AprioriRecord rec;
  const TorusField rho_t = rho_t_identity(rho, u);
  rec.rho_w1q0 = norm_w1q(rho, q0);
  rec.rho_t_lq0 = norm_lq(rho_t, q0);
  rec.rho_t_l2 = norm_l2(rho_t);
  rec.u_h1 = norm_h1(u);
  rec.u_h2 = norm_h2(u);
  rec.grad_u_l2 = norm_l2(grad(u));
  const TorusField wut = sqrt_rho_weighted(rho, u_t);
  rec.sqrt_rho_ut_l2 = norm_l2(wut);
  rec.rho_ut_sq = rec.sqrt_rho_ut_l2 * rec.sqrt_rho_ut_l2;
  rec.phi = 1.0 + rec.rho_w1q0 + rec.u_h1;
  rec.mass = integral(rho);
  double rmin = rho.values(0)[0];
  for (double v : rho.values(0)) rmin = std::min(rmin, v);
  rec.rho_min = rmin;
  const TorusField wru = sqrt_rho_weighted(rho, u);
  rec.energy_kinetic = 0.5 * inner_l2(wru, wru);
  return rec;
}

double elliptic_h2_surrogate(const TorusField& rho, const TorusField& u, const TorusField& u_t,
                             const ConstitutiveLaw& law, const PressureLaw& pressure,
                             const TorusField& f) {
  const double uh2 = norm_h2(u);
  if (uh2 <= 1e-14) return 0.0;
  const TorusField conv = dealias(contract_matrix_vector(grad(u), u));
  const TorusField F = dealias(multiply(rho, f - u_t - conv)) -
                       grad(dealias(pressure_of(pressure, rho)));
  (void)law;
  return uh2 / (norm_l2(F) + 1e-30);
}

BlowupVerdict blowup_watchdog(const std::vector<double>& times, const std::vector<double>& phi,
                              double threshold, double T) {
  BlowupVerdict v;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (times[i] > T) break;
    if (!std::isfinite(phi[i]) || phi[i] > threshold) {
      v.healthy = false;
      v.t_trigger = times[i];
      return v;
    }
  }
  return v;
}

TrajectoryMonitor::TrajectoryMonitor(const ConstitutiveLaw& law, const PressureLaw& pressure,
                                     double q0, double C0, double threshold)
    : law_(law), pressure_(pressure), q0_(q0), C0_(C0), threshold_(threshold) {}

void TrajectoryMonitor::add_step(double t, const TorusField& rho, const TorusField& u,
                                 const TorusField& u_t, const TorusField& f_now) {
  AprioriRecord rec = apriori_snapshot(rho, u, u_t, q0_);
  rec.t = t;
  rec.h2_surrogate = elliptic_h2_surrogate(rho, u, u_t, law_, pressure_, f_now);

  // running sums/sups
  const double w2 = norm_w2q(u, q0_);
  const double uth1 = norm_h1(u_t);
  rec.u_w2q0_sq = w2 * w2;
  rec.ut_h1_sq = uth1 * uth1;
  if (records_.empty()) {
    rec.phi_sup = rec.phi;
    rec.int_u_w2q0_sq = 0.0;
    rec.int_ut_h1_sq = 0.0;
  } else {
    const AprioriRecord& prev = records_.back();
    rec.phi_sup = std::max(prev.phi_sup, rec.phi);
    const double dt = t - prev.t;
    rec.int_u_w2q0_sq = prev.int_u_w2q0_sq + 0.5 * dt * (rec.u_w2q0_sq + prev.u_w2q0_sq);
    rec.int_ut_h1_sq = prev.int_ut_h1_sq + 0.5 * dt * (rec.ut_h1_sq + prev.ut_h1_sq);
  }
  rec.I = 1.0 + rec.rho_w1q0 + rec.rho_t_l2 + rec.u_h2 + rec.sqrt_rho_ut_l2 +
          rec.int_u_w2q0_sq + rec.int_ut_h1_sq;

  // energy budget terms
  const TorusField S = stress_field(law_, u);
  rec.dissipation_rate = inner_l2(S, grad(u));
  const TorusField rf = dealias(multiply(rho, f_now));
  rec.work_rate = inner_l2(rf, u) - inner_l2(grad(dealias(pressure_of(pressure_, rho))), u);

  records_.push_back(std::move(rec));
}

std::vector<double> TrajectoryMonitor::times() const {
  std::vector<double> ts;
  ts.reserve(records_.size());
  for (auto& r : records_) ts.push_back(r.t);
  return ts;
}

std::vector<double> TrajectoryMonitor::phi_series() const {
  std::vector<double> ps;
  ps.reserve(records_.size());
  for (auto& r : records_) ps.push_back(r.phi_sup);
  return ps;
}

BlowupVerdict TrajectoryMonitor::verdict(double T) const {
  return blowup_watchdog(times(), phi_series(), threshold_, T);
}

std::string TrajectoryMonitor::to_csv() const {
  std::string out =
      "t,phi,phi_sup,I,rho_w1q0,rho_t_lq0,rho_t_l2,u_h1,u_h2,grad_u_l2,sqrt_rho_ut_l2,"
      "rho_ut_sq,int_u_w2q0_sq,int_ut_h1_sq,energy_kinetic,dissipation_rate,work_rate,"
      "h2_surrogate,mass,rho_min\n";
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out += buf;
  };
  for (const AprioriRecord& r : records_) {
    put(r.t, ',');
    put(r.phi, ',');
    put(r.phi_sup, ',');
    put(r.I, ',');
    put(r.rho_w1q0, ',');
    put(r.rho_t_lq0, ',');
    put(r.rho_t_l2, ',');
    put(r.u_h1, ',');
    put(r.u_h2, ',');
    put(r.grad_u_l2, ',');
    put(r.sqrt_rho_ut_l2, ',');
    put(r.rho_ut_sq, ',');
    put(r.int_u_w2q0_sq, ',');
    put(r.int_ut_h1_sq, ',');
    put(r.energy_kinetic, ',');
    put(r.dissipation_rate, ',');
    put(r.work_rate, ',');
    put(r.h2_surrogate, ',');
    put(r.mass, ',');
    put(r.rho_min, '\n');
  }
  return out;
}

SolutionResiduals check_solution(const FieldSeries& rho_half, const FieldSeries& u_full,
                                 const ConstitutiveLaw& law, const PressureLaw& pressure,
                                 const TimeField& forcing) {
  SolutionResiduals out;
  const std::size_t nu = u_full.size();
  if (nu < 3) return out;
  const double dt = u_full.step();

  double m2_rho = 0.0, m3_rho = 0.0, m2_ru = 0.0, m3_ru = 0.0;
  double scale = 1e-30;

  std::vector<TorusField> rho_u(nu);
  for (std::size_t m = 0; m < nu; ++m)
    rho_u[m] = multiply(rho_half[2 * m], u_full[m]);

  for (std::size_t m = 1; m + 1 < nu; ++m) {
    const TorusField& rm = rho_half[2 * m];
    const TorusField& rp = rho_half[2 * (m + 1)];
    const TorusField& rq = rho_half[2 * (m - 1)];
    m2_rho = std::max(m2_rho, norm_l2(rp - rm * 2.0 + rq) / (dt * dt));
    m2_ru = std::max(m2_ru, norm_l2(rho_u[m + 1] - rho_u[m] * 2.0 + rho_u[m - 1]) / (dt * dt));
    if (m + 2 < nu) {
      m3_rho = std::max(m3_rho, norm_l2(rho_half[2 * (m + 2)] - rp * 3.0 + rm * 3.0 - rq) /
                                    (dt * dt * dt));
      m3_ru = std::max(m3_ru, norm_l2(rho_u[m + 2] - rho_u[m + 1] * 3.0 + rho_u[m] * 3.0 -
                                      rho_u[m - 1]) /
                                  (dt * dt * dt));
    }
  }

  for (std::size_t m = 1; m + 1 < nu; ++m) {
    const double t = u_full.t0() + m * dt;
    const TorusField& rho = rho_half[2 * m];
    const TorusField& u = u_full[m];

    const TorusField rho_t_fd = (rho_half[2 * (m + 1)] - rho_half[2 * (m - 1)]) * (0.5 / dt);
    const TorusField mass_res =
        rho_t_fd + dealias(multiply(rho, divergence(u))) +
        dealias([&] {
          const TorusField grad_rho = grad(rho);
          TorusField adv(rho.grid(), Rank::Scalar);
          auto dst = adv.values_mut(0);
          const std::size_t np = rho.npoints();
          for (int j = 0; j < rho.grid().d; ++j) {
            auto uv = u.values(j);
            auto gr = grad_rho.values(j);
            for (std::size_t i = 0; i < np; ++i) dst[i] += uv[i] * gr[i];
          }
          return adv;
        }());
    out.mass_residual = std::max(out.mass_residual, norm_l2(mass_res));

    const TorusField ut_fd = (u_full[m + 1] - u_full[m - 1]) * (0.5 / dt);
    const TorusField conv = dealias(contract_matrix_vector(grad(u), u));
    const TorusField mom_res = dealias(multiply(rho, ut_fd + conv - dealias(forcing(t)))) -
                               div_stress(law, u) +
                               grad(dealias(pressure_of(pressure, rho)));
    out.momentum_residual = std::max(out.momentum_residual, norm_l2(mom_res));
    scale = std::max({scale, norm_l2(rho), norm_l2(rho_u[m])});
  }

  out.mass_tolerance = dt * dt * (m2_rho + m3_rho) + 1e-13 * scale;
  out.momentum_tolerance = dt * dt * (m2_ru + m3_ru) + 1e-13 * scale;
  return out;
}

}  // namespace torusns

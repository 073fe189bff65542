#include "torusns/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"

namespace torusns {

void ProblemData::validate() const {
  const int d = rho0.grid().d;
  const double q_needed = d == 3 ? 3.0 : static_cast<double>(d);
  if (!(q > q_needed))
    throw std::invalid_argument("problem data: q must exceed " + std::to_string(q_needed));
  if (!(T > 0.0)) throw std::invalid_argument("problem data: T must be positive");
  double rmin = rho0.values(0)[0];
  for (double v : rho0.values(0)) rmin = std::min(rmin, v);
  if (rmin < -1e-12) throw std::invalid_argument("problem data: rho0 must be nonnegative");
}

FluidState regularize_and_initialize(const ProblemData& data, double delta,
                                     const ConstitutiveLaw& law, const PressureLaw& pressure,
                                     const LameParameter& lame, double elliptic_tol,
                                     int elliptic_max_iter, double* projected_mean) {
  if (delta < 0.0) throw std::invalid_argument("regularize: delta must be >= 0");
  const TorusGrid& g = data.rho0.grid();
  const std::size_t np = g.points();

  TorusField rho_delta = data.rho0;
  {
    auto dst = rho_delta.values_mut(0);
    for (std::size_t i = 0; i < np; ++i) dst[i] += delta;
  }

  // sqrt(rho0 + delta) g - grad p(rho0 + delta)
  TorusField rhs(g, Rank::Vector);
  {
    auto rv = rho_delta.values(0);
    for (int c = 0; c < g.d; ++c) {
      auto gv = data.g.values(c);
      auto dst = rhs.values_mut(c);
      for (std::size_t i = 0; i < np; ++i) dst[i] = std::sqrt(std::max(rv[i], 0.0)) * gv[i];
    }
  }
  rhs = dealias(rhs) - grad(dealias(pressure_of(pressure, rho_delta)));

  double removed = 0.0;
  for (int c = 0; c < g.d; ++c) removed += rhs.mean(c) * rhs.mean(c);
  removed = std::sqrt(removed) * g.volume();
  if (projected_mean) *projected_mean = removed;
  rhs = project_zero_mean(rhs);

  EllipticSolveReport rep = solve(law, lame, rhs, elliptic_tol, elliptic_max_iter);
  if (!rep.converged)
    throw ConvergenceError("regularize: initial elliptic solve did not converge (residual " +
                           std::to_string(rep.residual_l2) + ")");
  FluidState out;
  out.rho = std::move(rho_delta);
  out.u = std::move(rep.u);
  out.t = 0.0;
  out.delta = delta;
  return out;
}

namespace {

double sup_weighted_udiff(const FieldSeries& rho_half, const FieldSeries& u_new,
                          const FieldSeries& u_old) {
  double sup = 0.0;
  const std::size_t n = std::min(u_new.size(), u_old.size());
  for (std::size_t m = 0; m < n; ++m) {
    const TorusField& rho = rho_half[2 * m];
    TorusField diff = u_new[m] - u_old[m];
    auto rv = rho.values(0);
    const std::size_t np = diff.npoints();
    for (int c = 0; c < diff.ncomp(); ++c) {
      auto dv = diff.values_mut(c);
      for (std::size_t i = 0; i < np; ++i) dv[i] *= std::sqrt(std::max(rv[i], 0.0));
    }
    sup = std::max(sup, norm_l2(diff));
  }
  return sup;
}

double sup_rho_diff(const FieldSeries& rho_new, const FieldSeries& rho_old, std::size_t stride) {
  double sup = 0.0;
  const std::size_t n = std::min(rho_new.size(), rho_old.size());
  for (std::size_t m = 0; m < n; m += stride)
    sup = std::max(sup, norm_l2(rho_new[m] - rho_old[m]));
  return sup;
}

}  // namespace

std::pair<Trajectory, IterationTrace> picard(const ProblemData& data, double delta,
                                             const ConstitutiveLaw& law,
                                             const PressureLaw& pressure,
                                             const LameParameter& lame,
                                             const PicardSettings& settings, StageCache* cache,
                                             int delta_index) {
  data.validate();
  if (!law.certified()) throw Error("picard: law must be certified");
  const TorusGrid& g = data.rho0.grid();
  const double q0 = data.q0();

  IterationTrace trace;
  trace.C0 = [&] {
    const double gn = norm_l2(data.g);
    return gn * gn;
  }();

  StepConfig step = settings.step;
  step.t_end = data.T;

  const FluidState init =
      regularize_and_initialize(data, delta, law, pressure, lame, 1e-11, 200,
                                &trace.projected_mean);

  const double phi0 = 1.0 + norm_w1q(init.rho, q0) + norm_h1(init.u);
  const double threshold = settings.blowup_threshold_factor * phi0;

  Trajectory traj;
  traj.delta = delta;
  traj.t_star = data.T;

  // k = 0 iterate: u identically zero, rho frozen at the regularized datum
  const int nsteps = step.steps();
  FieldSeries u_prev_series(0.0, step.dt);
  FieldSeries rho_prev(0.0, 0.5 * step.dt);
  {
    TorusField zero(g, Rank::Vector);
    for (int m = 0; m <= nsteps; ++m) u_prev_series.push(zero);
    for (int m = 0; m <= 2 * nsteps; ++m) rho_prev.push(init.rho);
  }

  for (int k = 1; k <= settings.k_max; ++k) {
    StagePair stage;
    bool loaded = false;
    if (cache) {
      if (auto hit = cache->load(delta_index, k)) {
        stage = std::move(*hit);
        loaded = true;
      }
    }

    MomentumStageResult mom;
    if (!loaded) {
      const TimeField u_prev_fn = [&u_prev_series](double t) { return u_prev_series.at_time(t); };
      stage.rho = transport_stage(init.rho, u_prev_fn, step);

      StepConfig mstep = step;
      double phi_running = phi0;
      mstep.watch = [&](double t, const TorusField& u_now) {
        const std::size_t half_index =
            std::min(static_cast<std::size_t>(std::llround(2.0 * t / step.dt)),
                     stage.rho.size() - 1);
        const double phi_now =
            1.0 + norm_w1q(stage.rho[half_index], q0) + norm_h1(u_now);
        phi_running = std::max(phi_running, phi_now);
        if (!std::isfinite(phi_running) || phi_running > threshold) {
          traj.triggered = true;
          traj.t_trigger = t;
          return false;
        }
        return true;
      };
      mom = momentum_stage(law, pressure, stage.rho, u_prev_fn, init.u, data.f, mstep);
      stage.u = mom.u;
      if (cache && !traj.triggered) cache->store(delta_index, k, stage);
    }

    if (traj.triggered) {
      // report the last healthy time and halt the construction
      traj.t_star = traj.t_trigger - step.dt;
      traj.rho = std::move(stage.rho);
      traj.u = std::move(stage.u);
      trace.k_used = k;
      return {std::move(traj), std::move(trace)};
    }

    PicardIterateRecord rec;
    rec.k = k;
    rec.du_weighted = sup_weighted_udiff(stage.rho, stage.u, u_prev_series);
    rec.drho = sup_rho_diff(stage.rho, rho_prev, 2);
    rec.max_step_residual =
        mom.step_residuals.empty()
            ? 0.0
            : *std::max_element(mom.step_residuals.begin(), mom.step_residuals.end());

    // per-k sup norms and time integrals of the a priori pattern
    const std::size_t ns = stage.u.size();
    double prev_w2 = 0.0, prev_ut = 0.0;
    for (std::size_t m = 0; m < ns; ++m) {
      const TorusField& rho = stage.rho[2 * m];
      const TorusField& u = stage.u[m];
      TorusField ut = m == 0 ? (ns > 1 ? (stage.u[1] - stage.u[0]) * (1.0 / step.dt)
                                       : TorusField(g, Rank::Vector))
                     : m + 1 == ns
                         ? (stage.u[m] - stage.u[m - 1]) * (1.0 / step.dt)
                         : (stage.u[m + 1] - stage.u[m - 1]) * (0.5 / step.dt);
      const AprioriRecord snap = apriori_snapshot(rho, u, ut, q0);
      rec.phi_sup = std::max(rec.phi_sup, snap.phi);
      rec.sup_u_h2 = std::max(rec.sup_u_h2, snap.u_h2);
      rec.sup_sqrt_rho_ut = std::max(rec.sup_sqrt_rho_ut, snap.sqrt_rho_ut_l2);
      rec.sup_rho_t_lq0 = std::max(rec.sup_rho_t_lq0, snap.rho_t_lq0);
      const double w2 = norm_w2q(u, q0);
      const double uth1 = norm_h1(ut);
      if (m > 0) {
        rec.int_u_w2q0_sq += 0.5 * step.dt * (w2 * w2 + prev_w2);
        rec.int_ut_h1_sq += 0.5 * step.dt * (uth1 * uth1 + prev_ut);
      }
      prev_w2 = w2 * w2;
      prev_ut = uth1 * uth1;
    }
    trace.iterates.push_back(rec);

    u_prev_series = stage.u;
    rho_prev = stage.rho;
    trace.k_used = k;

    if (rec.du_weighted + rec.drho < settings.tol) {
      trace.converged = true;
      traj.rho = std::move(stage.rho);
      traj.u = std::move(stage.u);
      return {std::move(traj), std::move(trace)};
    }
  }

  traj.rho = std::move(rho_prev);
  traj.u = std::move(u_prev_series);
  return {std::move(traj), std::move(trace)};
}

std::pair<Trajectory, DeltaContinuationReport> continuation_in_delta(
    const ProblemData& data, const ConstitutiveLaw& law, const PressureLaw& pressure,
    const LameParameter& lame, const std::vector<double>& delta_schedule,
    const PicardSettings& settings, double cauchy_tol, StageCache* cache) {
  if (delta_schedule.empty())
    throw std::invalid_argument("continuation: delta schedule must not be empty");
  for (std::size_t i = 1; i < delta_schedule.size(); ++i)
    if (!(delta_schedule[i] < delta_schedule[i - 1]))
      throw std::invalid_argument("continuation: delta schedule must decrease strictly");

  DeltaContinuationReport rep;
  std::optional<Trajectory> prev;
  Trajectory last;
  const double q0 = data.q0();

  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    auto [traj, trace] = picard(data, delta_schedule[i], law, pressure, lame, settings, cache,
                                static_cast<int>(i));
    rep.deltas.push_back(delta_schedule[i]);
    rep.traces.push_back(std::move(trace));
    rep.any_triggered = rep.any_triggered || traj.triggered;

    if (prev && !traj.triggered && !prev->triggered) {
      double du = 0.0, drho = 0.0;
      const std::size_t n = std::min(traj.u.size(), prev->u.size());
      for (std::size_t m = 0; m < n; ++m) {
        du = std::max(du, norm_h1(traj.u[m] - prev->u[m]));
        drho = std::max(drho, norm_lq(traj.rho[2 * m] - prev->rho[2 * m], q0));
      }
      rep.u_h1_diffs.push_back(du);
      rep.rho_lq0_diffs.push_back(drho);
    }
    prev = traj;
    last = std::move(traj);
    if (last.triggered) break;
  }

  if (!rep.u_h1_diffs.empty())
    rep.cauchy = rep.u_h1_diffs.back() + rep.rho_lq0_diffs.back() < cauchy_tol;
  return {std::move(last), std::move(rep)};
}

TwinReport twin_run(const ProblemData& a, const ProblemData& b, double delta,
                    const ConstitutiveLaw& law, const PressureLaw& pressure,
                    const LameParameter& lame, const PicardSettings& settings) {
  auto [ta, ra] = picard(a, delta, law, pressure, lame, settings);
  auto [tb, rb] = picard(b, delta, law, pressure, lame, settings);

  TwinReport rep;
  const std::size_t n = std::min(ta.u.size(), tb.u.size());
  rep.identical = ta.u.size() == tb.u.size();
  for (std::size_t m = 0; m < n; ++m) {
    const double t = m * ta.u.step();
    rep.times.push_back(t);
    rep.du_l2.push_back(norm_l2(ta.u[m] - tb.u[m]));
    rep.drho_l2.push_back(norm_l2(ta.rho[2 * m] - tb.rho[2 * m]));
    rep.max_du = std::max(rep.max_du, rep.du_l2.back());
    rep.max_drho = std::max(rep.max_drho, rep.drho_l2.back());
    if (rep.identical) {
      for (int c = 0; c < ta.u[m].ncomp() && rep.identical; ++c) {
        auto va = ta.u[m].values(c);
        auto vb = tb.u[m].values(c);
        for (std::size_t i = 0; i < va.size(); ++i)
          if (va[i] != vb[i]) {
            rep.identical = false;
            break;
          }
      }
      for (int c = 0; c < 1 && rep.identical; ++c) {
        auto va = ta.rho[2 * m].values(0);
        auto vb = tb.rho[2 * m].values(0);
        for (std::size_t i = 0; i < va.size(); ++i)
          if (va[i] != vb[i]) {
            rep.identical = false;
            break;
          }
      }
    }
  }

  // distance between the two data sets
  double df = 0.0;
  const int probes = 8;
  for (int i = 0; i <= probes; ++i) {
    const double t = a.T * i / probes;
    df = std::max(df, norm_l2(a.f(t) - b.f(t)));
  }
  rep.data_distance = norm_l2(a.rho0 - b.rho0) + norm_l2(a.g - b.g) + df;
  return rep;
}

}  // namespace torusns

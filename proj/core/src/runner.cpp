#include "torusns/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "torusns/errors.hpp"
#include "torusns/field_io.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"
#include "torusns/random_field.hpp"

namespace torusns {

namespace {

TorusField make_rho0(const RunConfig& cfg) {
  const TorusGrid& g = cfg.grid;
  if (cfg.rho0_preset == "constant") {
    TorusField rho(g, Rank::Scalar);
    auto v = rho.values_mut(0);
    for (auto& x : v) x = cfg.rho0_value;
    return rho;
  }
  if (cfg.rho0_preset == "bump_with_vacuum") {
    // cos^power glue supported on half of the first axis, vanishing on the
    // other half; high powers keep the spectral tail (and the undershoot
    // after dealiasing) negligible at desk resolutions
    const int power = cfg.bump_power;
    const double amp = cfg.rho0_value;
    return dealias(sample_scalar(g, [power, amp](const Point& x) {
      const double c = std::cos(x[0]);  // bump centered at x = 0, support |x| < pi/2
      return c > 0.0 ? amp * std::pow(c, power) : 0.0;
    }));
  }
  if (cfg.rho0_preset == "random_band") {
    RandomSpec spec;
    spec.seed = cfg.seed;
    spec.stream = 0x01;
    spec.kmax = std::max(1, g.dealias_cutoff() / 2);
    TorusField fluct = random_band_limited(g, Rank::Scalar, spec);
    const double m = fluct.max_abs();
    TorusField rho(g, Rank::Scalar);
    auto v = rho.values_mut(0);
    auto fv = fluct.values(0);
    const double scale = m > 0.0 ? cfg.rho0_amplitude / m : 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cfg.rho0_value + scale * fv[i];
    return rho;
  }
  throw std::invalid_argument("unknown rho0 preset '" + cfg.rho0_preset + "'");
}

TorusField make_g(const RunConfig& cfg) {
  const TorusGrid& g = cfg.grid;
  if (cfg.g_preset == "zero") return TorusField(g, Rank::Vector);
  if (cfg.g_preset == "single_mode") {
    const int comp = cfg.g_component;
    const int wave = cfg.g_wave;
    const double amp = cfg.g_amplitude;
    return sample_vector(g, [comp, wave, amp](int c, const Point& x) {
      return c == comp ? amp * std::sin(wave * x[0]) : 0.0;
    });
  }
  if (cfg.g_preset == "random_band") {
    RandomSpec spec;
    spec.seed = cfg.seed;
    spec.stream = 0x02;
    spec.kmax = std::max(1, g.dealias_cutoff() / 2);
    spec.amplitude = cfg.g_amplitude;
    return random_band_limited(g, Rank::Vector, spec);
  }
  throw std::invalid_argument("unknown g preset '" + cfg.g_preset + "'");
}

TimeField make_f(const RunConfig& cfg) {
  const TorusGrid& g = cfg.grid;
  if (cfg.f_preset == "zero") {
    return [g](double) { return TorusField(g, Rank::Vector); };
  }
  const int comp = cfg.f_component;
  const int wave = cfg.f_wave;
  const double amp = cfg.f_amplitude;
  if (cfg.f_preset == "single_mode") {
    TorusField base = sample_vector(g, [comp, wave, amp](int c, const Point& x) {
      return c == comp ? amp * std::sin(wave * x[0]) : 0.0;
    });
    return [base](double) { return base; };
  }
  if (cfg.f_preset == "ramp") {
    TorusField base = sample_vector(g, [comp, wave, amp](int c, const Point& x) {
      return c == comp ? amp * std::sin(wave * x[0]) : 0.0;
    });
    return [base](double t) { return base * t; };
  }
  throw std::invalid_argument("unknown f preset '" + cfg.f_preset + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv("TORUSNS_OUTPUT_DIR"); env && *env) return env;
  return configured;
}

ProblemData build_problem_data(const RunConfig& cfg) {
  ProblemData data;
  data.rho0 = make_rho0(cfg);
  data.g = make_g(cfg);
  data.f = make_f(cfg);
  data.q = cfg.q;
  data.T = cfg.T;
  return data;
}

RunOutcome run_pipeline(const RunConfig& cfg) {
  RunOutcome outcome;
  outcome.output_dir = resolve_output_dir(cfg.output_dir);
  std::filesystem::create_directories(outcome.output_dir);

  std::ostringstream report;

  ConstitutiveLaw law = make_law(cfg.law);
  const CertifyReport cert = certify(law);
  report << "law: " << law.name() << "\n"
         << "certified: " << (cert.passed ? "yes" : "no") << "\n"
         << "eps_mu_1: " << format_double(cert.constants.eps_mu_1) << "\n"
         << "eps_mu_2: " << format_double(cert.constants.eps_mu_2) << "\n"
         << "eps_lambda_1: " << format_double(cert.constants.eps_lambda_1) << "\n"
         << "eps_lambda_2: " << format_double(cert.constants.eps_lambda_2) << "\n";
  if (!cert.passed) {
    report << "violation: " << cert.violation << " at sample "
           << format_double(cert.witness) << "\n";
    outcome.exit_code = 2;
    outcome.summary = "certification failed: " + cert.violation;
    write_text(outcome.output_dir + "/report.txt", report.str());
    return outcome;
  }

  const PressureLaw pressure = make_pressure(cfg.pressure);
  LameParameter lame = default_lame_parameter(law);
  if (cfg.lambda_bar) lame.lambda_bar = *cfg.lambda_bar;

  ProblemData data = build_problem_data(cfg);
  data.validate();

  PicardSettings settings;
  settings.k_max = cfg.k_max;
  settings.tol = cfg.picard_tol;
  settings.step.dt = cfg.dt;
  settings.step.t_end = cfg.T;
  settings.step.cfl_safety = cfg.cfl_safety;
  settings.step.implicit_tol = cfg.implicit_tol;
  settings.step.implicit_max_iter = cfg.implicit_max_iter;
  settings.blowup_threshold_factor = cfg.blowup_threshold_factor;

  std::unique_ptr<FileStageCache> cache;
  if (cfg.checkpoints) {
    const std::uint64_t h = fnv1a(cfg.canonical_text().data(), cfg.canonical_text().size());
    cache = std::make_unique<FileStageCache>(outcome.output_dir + "/checkpoints", h);
  }

  auto [traj, delta_report] = continuation_in_delta(data, law, pressure, lame,
                                                    cfg.delta_schedule, settings, cfg.cauchy_tol,
                                                    cache.get());

  report << "C0: " << format_double(delta_report.traces.empty()
                                        ? 0.0
                                        : delta_report.traces.front().C0)
         << "\n";
  for (std::size_t i = 0; i < delta_report.deltas.size(); ++i) {
    const IterationTrace& tr = delta_report.traces[i];
    report << "delta " << format_double(delta_report.deltas[i]) << ": k_used=" << tr.k_used
           << " converged=" << (tr.converged ? "yes" : "no")
           << " projected_mean=" << format_double(tr.projected_mean) << "\n";
    for (const PicardIterateRecord& it : tr.iterates)
      report << "  k=" << it.k << " du=" << format_double(it.du_weighted)
             << " drho=" << format_double(it.drho) << " phi_sup=" << format_double(it.phi_sup)
             << " u_h2_sup=" << format_double(it.sup_u_h2)
             << " step_residual=" << format_double(it.max_step_residual) << "\n";
  }
  for (std::size_t i = 0; i < delta_report.u_h1_diffs.size(); ++i)
    report << "delta_diff " << i << ": u_h1=" << format_double(delta_report.u_h1_diffs[i])
           << " rho_lq0=" << format_double(delta_report.rho_lq0_diffs[i]) << "\n";
  report << "cauchy: " << (delta_report.cauchy ? "yes" : "no") << "\n";
  report << "t_star: " << format_double(traj.t_star) << "\n";
  report << "triggered: " << (traj.triggered ? "yes" : "no") << "\n";
  if (traj.triggered) report << "t_trigger: " << format_double(traj.t_trigger) << "\n";

  // monitor series along the final trajectory
  const double q0 = data.q0();
  const double C0 = delta_report.traces.empty() ? 0.0 : delta_report.traces.front().C0;
  const double phi0 = 1.0 + norm_w1q(traj.rho[0], q0) + norm_h1(traj.u[0]);
  TrajectoryMonitor monitor(law, pressure, q0, C0, cfg.blowup_threshold_factor * phi0);
  const std::size_t ns = traj.u.size();
  for (std::size_t m = 0; m < ns; ++m) {
    const double t = m * traj.u.step();
    TorusField ut = m == 0 ? (ns > 1 ? (traj.u[1] - traj.u[0]) * (1.0 / traj.u.step())
                                     : TorusField(cfg.grid, Rank::Vector))
                   : m + 1 == ns
                       ? (traj.u[m] - traj.u[m - 1]) * (1.0 / traj.u.step())
                       : (traj.u[m + 1] - traj.u[m - 1]) * (0.5 / traj.u.step());
    monitor.add_step(t, traj.rho[2 * m], traj.u[m], ut, data.f(t));
  }
  write_text(outcome.output_dir + "/monitors.csv", monitor.to_csv());

  const SolutionResiduals res = check_solution(traj.rho, traj.u, law, pressure, data.f);
  report << "mass_residual: " << format_double(res.mass_residual) << "\n"
         << "mass_tolerance: " << format_double(res.mass_tolerance) << "\n"
         << "momentum_residual: " << format_double(res.momentum_residual) << "\n"
         << "momentum_tolerance: " << format_double(res.momentum_tolerance) << "\n";

  // final state fields
  save_field(outcome.output_dir + "/rho_final.fld", traj.rho[traj.rho.size() - 1],
             traj.rho.t_back(), traj.delta);
  save_field(outcome.output_dir + "/u_final.fld", traj.u[traj.u.size() - 1], traj.u.t_back(),
             traj.delta);

  const bool converged_all = [&] {
    for (const auto& tr : delta_report.traces)
      if (!tr.converged) return false;
    return !delta_report.traces.empty();
  }();

  if (traj.triggered) {
    outcome.exit_code = 2;
    outcome.summary = "blow-up watchdog triggered at t = " + format_double(traj.t_trigger);
  } else if (!converged_all) {
    outcome.exit_code = 2;
    outcome.summary = "picard iteration did not converge within k_max";
  } else {
    outcome.summary = "run complete: t_star = " + format_double(traj.t_star) +
                      ", cauchy = " + (delta_report.cauchy ? "yes" : "no");
  }
  report << "summary: " << outcome.summary << "\n";
  write_text(outcome.output_dir + "/report.txt", report.str());
  return outcome;
}

RunOutcome twin_pipeline(const RunConfig& a, const RunConfig& b, const std::string& out_dir) {
  RunOutcome outcome;
  outcome.output_dir = resolve_output_dir(out_dir);
  std::filesystem::create_directories(outcome.output_dir);

  ConstitutiveLaw law = make_law(a.law);
  const CertifyReport cert = certify(law);
  if (!cert.passed) {
    outcome.exit_code = 2;
    outcome.summary = "certification failed: " + cert.violation;
    return outcome;
  }
  const PressureLaw pressure = make_pressure(a.pressure);
  LameParameter lame = default_lame_parameter(law);
  if (a.lambda_bar) lame.lambda_bar = *a.lambda_bar;

  ProblemData da = build_problem_data(a);
  ProblemData db = build_problem_data(b);
  da.validate();
  db.validate();

  PicardSettings settings;
  settings.k_max = a.k_max;
  settings.tol = a.picard_tol;
  settings.step.dt = a.dt;
  settings.step.t_end = a.T;
  settings.step.cfl_safety = a.cfl_safety;
  settings.step.implicit_tol = a.implicit_tol;
  settings.step.implicit_max_iter = a.implicit_max_iter;
  settings.blowup_threshold_factor = a.blowup_threshold_factor;

  const double delta = a.delta_schedule.empty() ? 1e-3 : a.delta_schedule.back();
  const TwinReport rep = twin_run(da, db, delta, law, pressure, lame, settings);

  std::string csv = "t,du_l2,drho_l2\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    csv += format_double(rep.times[i]) + "," + format_double(rep.du_l2[i]) + "," +
           format_double(rep.drho_l2[i]) + "\n";
  write_text(outcome.output_dir + "/twin.csv", csv);

  std::ostringstream report;
  report << "identical: " << (rep.identical ? "yes" : "no") << "\n"
         << "data_distance: " << format_double(rep.data_distance) << "\n"
         << "max_du_l2: " << format_double(rep.max_du) << "\n"
         << "max_drho_l2: " << format_double(rep.max_drho) << "\n";
  write_text(outcome.output_dir + "/twin_report.txt", report.str());

  outcome.summary = "twin run: max |u_a - u_b| = " + format_double(rep.max_du);
  return outcome;
}

}  // namespace torusns

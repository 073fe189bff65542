// Command-line front end: certify | elliptic | lame-constants | run | twin | report.
// Exit codes: 0 success, 1 usage error, 2 physics-level failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "torusns/elliptic.hpp"
#include "torusns/errors.hpp"
#include "torusns/field_io.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"
#include "torusns/random_field.hpp"
#include "torusns/runner.hpp"

namespace {

using namespace torusns;

LawSpec law_spec_from(const std::string& name, const std::vector<std::string>& params,
                      double s_max, double r_max) {
  LawSpec spec;
  spec.name = name;
  spec.s_max = s_max;
  spec.r_max = r_max;
  for (const std::string& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("law parameter must look like key=value: '" + p + "'");
    spec.params[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
  }
  return spec;
}

int cmd_certify(const std::string& name, const std::vector<std::string>& params, double s_max,
                double r_max, int samples) {
  ConstitutiveLaw law = make_law(law_spec_from(name, params, s_max, r_max));
  const CertifyReport rep = certify(law, samples);
  std::printf("law: %s\n", law.name().c_str());
  std::printf("scan: s in [0, %g], r in [-%g, %g]\n", s_max, r_max, r_max);
  std::printf("eps_mu_1:     %.17g\n", rep.constants.eps_mu_1);
  std::printf("eps_mu_2:     %.17g\n", rep.constants.eps_mu_2);
  std::printf("eps_lambda_1: %.17g\n", rep.constants.eps_lambda_1);
  std::printf("eps_lambda_2: %.17g\n", rep.constants.eps_lambda_2);
  std::printf("eps_mu:       %.17g\n", rep.constants.eps_mu());
  if (rep.passed) {
    std::printf("verdict: pass\n");
    return 0;
  }
  std::printf("verdict: fail\nviolated: %s\nwitness: %.17g\n", rep.violation.c_str(),
              rep.witness);
  return 2;
}

int cmd_lame_constants(double p, int d, double lambda_bar, int measure_trials, int n) {
  LameParameter param{lambda_bar};
  const RieszConstants rc = riesz_constants(p, d, param);
  std::printf("p: %g\nd: %d\nlambda_bar: %.17g\n", p, d, lambda_bar);
  std::printf("C1 (grad^2 bound):   %.17g\n", rc.C1);
  std::printf("C2 (grad div bound): %.17g\n", rc.C2);
  std::printf("C_total:             %.17g\n", rc.C_total);
  if (measure_trials > 0) {
    TorusGrid grid{d, n, 2.0 / 3.0};
    const double measured = measured_operator_norm(param, p, measure_trials, grid);
    std::printf("measured (%d trials, n=%d): %.17g\n", measure_trials, n, measured);
    std::printf("within C1: %s\n", measured <= rc.C1 ? "yes" : "no");
  }
  return 0;
}

int cmd_elliptic(int d, int n, const std::string& law_name,
                 const std::vector<std::string>& params, double s_max, double r_max,
                 const std::string& f_kind, double amplitude, std::uint64_t seed, double tol,
                 int max_iter, double p_exponent) {
  ConstitutiveLaw law = make_law(law_spec_from(law_name, params, s_max, r_max));
  const CertifyReport cert = certify(law);
  if (!cert.passed) {
    std::printf("certification failed: %s\n", cert.violation.c_str());
    return 2;
  }
  TorusGrid grid{d, n, 2.0 / 3.0};
  const LameParameter lame = default_lame_parameter(law);

  TorusField f(grid, Rank::Vector);
  TorusField u_star;
  bool have_star = false;
  if (f_kind == "manufactured") {
    u_star = sample_vector(grid, [amplitude](int c, const Point& x) {
      return c == 0 ? amplitude * std::sin(x[0]) : 0.0;
    });
    f = div_stress(law, u_star) * -1.0;
    have_star = true;
  } else if (f_kind == "random") {
    RandomSpec spec;
    spec.seed = seed;
    spec.kmax = grid.dealias_cutoff() / 2;
    spec.amplitude = amplitude;
    f = random_band_limited(grid, Rank::Vector, spec);
  } else {
    std::fprintf(stderr, "unknown f kind '%s' (use manufactured|random)\n", f_kind.c_str());
    return 1;
  }

  EllipticSolveReport rep = solve(law, lame, f, tol, max_iter);
  const EstimateResult h2 = rep.converged ? verify_h2_estimate(law, f, rep) : EstimateResult{};
  const SmallnessCertificate small = certify_smallness(law, lame, p_exponent, 1.0, d);

  std::printf("converged: %s\n", rep.converged ? "yes" : "no");
  std::printf("iterations: %d\n", rep.iterations);
  std::printf("residual_l2: %.17g\n", rep.residual_l2);
  if (!rep.residual_history.empty()) {
    std::printf("residual_history:");
    for (double r : rep.residual_history) std::printf(" %.3e", r);
    std::printf("\n");
  }
  if (have_star && rep.converged)
    std::printf("error_vs_manufactured: %.17g\n",
                norm_l2(rep.u - u_star) / std::max(norm_l2(u_star), 1e-300));
  if (rep.converged)
    std::printf("h2_estimate: lhs=%.17g rhs=%.17g %s\n", h2.lhs, h2.rhs,
                h2.informative ? "(informative)" : (h2.satisfied ? "satisfied" : "violated"));
  std::printf("smallness: alpha=%g c=%g kappa=%.17g delta=%.17g certified=%s\n", small.alpha,
              small.c, small.kappa, small.delta_contraction, small.certified ? "yes" : "no");
  return rep.converged ? 0 : 2;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  ParseResult parsed = parse_config_file(config_path);
  if (!parsed.config) {
    for (const std::string& v : parsed.violations) std::fprintf(stderr, "config: %s\n", v.c_str());
    return 1;
  }
  RunConfig cfg = *parsed.config;
  if (!out_override.empty()) cfg.output_dir = out_override;
  const RunOutcome outcome = run_pipeline(cfg);
  std::printf("%s\n", outcome.summary.c_str());
  std::printf("outputs: %s\n", outcome.output_dir.c_str());
  return outcome.exit_code;
}

int cmd_twin(const std::string& config_a, const std::string& config_b,
             const std::string& out_dir) {
  ParseResult pa = parse_config_file(config_a);
  ParseResult pb = parse_config_file(config_b);
  for (const auto* p : {&pa, &pb})
    if (!p->config) {
      for (const std::string& v : p->violations) std::fprintf(stderr, "config: %s\n", v.c_str());
      return 1;
    }
  const RunOutcome outcome =
      twin_pipeline(*pa.config, *pb.config, out_dir.empty() ? "twin_out" : out_dir);
  std::printf("%s\n", outcome.summary.c_str());
  return outcome.exit_code;
}

int cmd_report(const std::string& dir) {
  const std::string report_path = dir + "/report.txt";
  std::ifstream in(report_path);
  if (!in) {
    std::fprintf(stderr, "no report at '%s'\n", report_path.c_str());
    return 1;
  }
  std::cout << in.rdbuf();
  std::ifstream csv(dir + "/monitors.csv");
  if (csv) {
    std::string line, last, header;
    std::getline(csv, header);
    std::size_t rows = 0;
    while (std::getline(csv, line))
      if (!line.empty()) {
        last = line;
        ++rows;
      }
    std::printf("monitor rows: %zu\n", rows);
    if (!last.empty()) std::printf("last row: %s\n", last.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral compressible non-Newtonian Navier-Stokes laboratory"};
  app.require_subcommand(1);

  // certify
  std::string law_name = "newtonian";
  std::vector<std::string> law_params;
  double s_max = 4.0, r_max = 4.0;
  int samples = 2048;
  auto* certify_cmd = app.add_subcommand("certify", "certify the ellipticity of a viscosity pair");
  certify_cmd->add_option("--law", law_name, "newtonian | power_law | p_delta | table");
  certify_cmd->add_option("--param", law_params, "law parameter key=value (repeatable)");
  certify_cmd->add_option("--s-max", s_max, "scan bound for s");
  certify_cmd->add_option("--r-max", r_max, "scan bound for r");
  certify_cmd->add_option("--samples", samples, "scan samples per axis");

  // lame-constants
  double lc_p = 2.0, lc_lb = 0.0;
  int lc_d = 3, lc_measure = 0, lc_n = 16;
  auto* lame_cmd = app.add_subcommand("lame-constants", "printed Riesz-transform operator bounds");
  lame_cmd->add_option("--p", lc_p, "Lebesgue exponent, p >= 2");
  lame_cmd->add_option("--d", lc_d, "dimension");
  lame_cmd->add_option("--lambda-bar", lc_lb, "Lame parameter, > -1/2");
  lame_cmd->add_option("--measure", lc_measure, "also measure the ratio over this many trials");
  lame_cmd->add_option("--n", lc_n, "grid size for measurement");

  // elliptic
  int el_d = 3, el_n = 32, el_max_iter = 200;
  std::string el_f = "manufactured";
  double el_amp = 0.1, el_tol = 1e-11, el_p = 2.0;
  std::uint64_t el_seed = 1;
  auto* elliptic_cmd = app.add_subcommand("elliptic", "solve -div S u = f and verify estimates");
  elliptic_cmd->add_option("--d", el_d, "dimension");
  elliptic_cmd->add_option("--n", el_n, "modes per axis");
  elliptic_cmd->add_option("--law", law_name, "law name");
  elliptic_cmd->add_option("--param", law_params, "law parameter key=value (repeatable)");
  elliptic_cmd->add_option("--s-max", s_max, "scan bound for s");
  elliptic_cmd->add_option("--r-max", r_max, "scan bound for r");
  elliptic_cmd->add_option("--f", el_f, "manufactured | random");
  elliptic_cmd->add_option("--amplitude", el_amp, "field amplitude");
  elliptic_cmd->add_option("--seed", el_seed, "random seed");
  elliptic_cmd->add_option("--tol", el_tol, "relative residual tolerance");
  elliptic_cmd->add_option("--max-iter", el_max_iter, "fixed-point iteration cap");
  elliptic_cmd->add_option("--p", el_p, "exponent for the smallness certificate");

  // run
  std::string config_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory override");

  // twin
  std::string config_b;
  auto* twin_cmd = app.add_subcommand("twin", "continuous-dependence twin runs");
  twin_cmd->add_option("--config", config_path, "first config file")->required();
  twin_cmd->add_option("--config-b", config_b, "second config file")->required();
  twin_cmd->add_option("--out", out_dir, "output directory");

  // report
  std::string report_dir = "out";
  auto* report_cmd = app.add_subcommand("report", "summarize a finished run directory");
  report_cmd->add_option("--dir", report_dir, "run output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify_cmd->parsed()) return cmd_certify(law_name, law_params, s_max, r_max, samples);
    if (lame_cmd->parsed()) return cmd_lame_constants(lc_p, lc_d, lc_lb, lc_measure, lc_n);
    if (elliptic_cmd->parsed())
      return cmd_elliptic(el_d, el_n, law_name, law_params, s_max, r_max, el_f, el_amp, el_seed,
                          el_tol, el_max_iter, el_p);
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (twin_cmd->parsed()) return cmd_twin(config_path, config_b, out_dir);
    if (report_cmd->parsed()) return cmd_report(report_dir);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const torusns::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}

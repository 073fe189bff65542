#pragma once

#include <string>
#include <vector>

#include "torusns/constitutive.hpp"
#include "torusns/evolution.hpp"
#include "torusns/field.hpp"

namespace torusns {

/// Snapshot of every functional the a priori bounds control. Time integrals
/// are running trapezoid sums from the stage start.
struct AprioriRecord {
  double t = 0.0;
  double phi = 0.0;         // 1 + |rho|_W1q0 + |u|_H1 at this instant
  double phi_sup = 0.0;     // running sup (the phi_K convention)
  double rho_w1q0 = 0.0;
  double rho_t_lq0 = 0.0;
  double rho_t_l2 = 0.0;
  double u_h1 = 0.0;
  double u_h2 = 0.0;
  double grad_u_l2 = 0.0;
  double sqrt_rho_ut_l2 = 0.0;
  double rho_ut_sq = 0.0;   // int rho |u_t|^2
  double u_w2q0_sq = 0.0;   // |u|^2_W2q0 at this instant
  double ut_h1_sq = 0.0;    // |u_t|^2_H1 at this instant
  double int_u_w2q0_sq = 0.0;
  double int_ut_h1_sq = 0.0;
  double I = 0.0;  // blow-up functional
  double energy_kinetic = 0.0;      // int rho |u|^2 / 2
  double dissipation_rate = 0.0;    // int S u : grad u
  double work_rate = 0.0;           // int rho f . u - int grad p . u
  double h2_surrogate = 0.0;
  double mass = 0.0;
  double rho_min = 0.0;

  bool finite() const;
};

/// rho_t evaluated through the continuity identity -u.grad rho - rho div u
/// (spectral derivatives, dealiased products).
TorusField rho_t_identity(const TorusField& rho, const TorusField& u);

/// Instantaneous record (no running sums filled in).
AprioriRecord apriori_snapshot(const TorusField& rho, const TorusField& u, const TorusField& u_t,
                               double q0);

/// Empirical elliptic-regularity ratio |u|_H2 / (|F|_L2 + eps) with
/// F = rho f - rho u_t - rho (u.grad)u - grad p(rho); 0 for the zero state.
double elliptic_h2_surrogate(const TorusField& rho, const TorusField& u, const TorusField& u_t,
                             const ConstitutiveLaw& law, const PressureLaw& pressure,
                             const TorusField& f);

struct BlowupVerdict {
  bool healthy = true;
  double t_trigger = 0.0;
};

/// Triggered when phi exceeds the threshold or stops being finite before T.
BlowupVerdict blowup_watchdog(const std::vector<double>& times, const std::vector<double>& phi,
                              double threshold, double T);

/// Accumulates records along a trajectory, feeding consecutive full steps.
class TrajectoryMonitor {
 public:
  TrajectoryMonitor(const ConstitutiveLaw& law, const PressureLaw& pressure, double q0,
                    double C0, double threshold);

  void add_step(double t, const TorusField& rho, const TorusField& u, const TorusField& u_t,
                const TorusField& f_now);

  const std::vector<AprioriRecord>& records() const { return records_; }
  std::vector<double> times() const;
  std::vector<double> phi_series() const;
  double threshold() const { return threshold_; }
  double C0() const { return C0_; }
  BlowupVerdict verdict(double T) const;

  /// CSV with one row per step, one column per functional; doubles printed
  /// with %.17g so identical runs serialize byte-identically.
  std::string to_csv() const;

 private:
  const ConstitutiveLaw& law_;
  const PressureLaw& pressure_;
  double q0_;
  double C0_;
  double threshold_;
  std::vector<AprioriRecord> records_;
};

/// Residuals of the strong form of both equations, evaluated on a stored
/// trajectory by centered time differences, with the matching
/// discretization tolerance derived from measured second and third time
/// differences of rho and rho u.
struct SolutionResiduals {
  double mass_residual = 0.0;
  double momentum_residual = 0.0;
  double mass_tolerance = 0.0;
  double momentum_tolerance = 0.0;
};

SolutionResiduals check_solution(const FieldSeries& rho_half, const FieldSeries& u_full,
                                 const ConstitutiveLaw& law, const PressureLaw& pressure,
                                 const TimeField& forcing);

}  // namespace torusns

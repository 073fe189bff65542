#pragma once

#include <optional>
#include <vector>

#include "torusns/elliptic.hpp"
#include "torusns/evolution.hpp"
#include "torusns/monitors.hpp"

namespace torusns {

/// Problem data in the form the construction consumes: the compatibility
/// datum g is supplied directly and the initial velocity is always derived
/// from the regularized elliptic problem.
struct ProblemData {
  TorusField rho0;  // >= 0
  TorusField g;     // L^2 datum of -div S u0 + grad p(rho0) = sqrt(rho0) g
  TimeField f;      // forcing
  double q = 6.0;
  double T = 0.1;

  double q0() const { return q < 6.0 ? q : 6.0; }
  /// q > 3 when d = 3 (relaxed to q > d for lower-dimensional runs); rho0 >= 0.
  void validate() const;
};

struct PicardSettings {
  int k_max = 12;
  double tol = 1e-6;
  StepConfig step;
  double blowup_threshold_factor = 1e3;  // threshold = factor * phi(0)
};

/// Converged (or last attempted) approximate trajectory for one delta.
struct Trajectory {
  FieldSeries rho;  // half-dt sampling
  FieldSeries u;    // full-dt sampling
  double delta = 0.0;
  double t_star = 0.0;
  bool triggered = false;
  double t_trigger = 0.0;
};

struct PicardIterateRecord {
  int k = 0;
  double du_weighted = 0.0;  // sup_t |sqrt(rho^k)(u^k - u^{k-1})|_L2
  double drho = 0.0;         // sup_t |rho^k - rho^{k-1}|_L2
  double phi_sup = 0.0;
  double sup_u_h2 = 0.0;
  double sup_sqrt_rho_ut = 0.0;
  double sup_rho_t_lq0 = 0.0;
  double int_u_w2q0_sq = 0.0;
  double int_ut_h1_sq = 0.0;
  double max_step_residual = 0.0;
};

struct IterationTrace {
  std::vector<PicardIterateRecord> iterates;
  bool converged = false;
  int k_used = 0;
  double projected_mean = 0.0;  // norm of the mean removed from the elliptic right side
  double C0 = 0.0;              // |g|_L2^2
};

/// Persistence hook for per-(delta, k) stages; implemented over the field
/// file format in field_io.
struct StagePair {
  FieldSeries rho;
  FieldSeries u;
};

class StageCache {
 public:
  virtual ~StageCache() = default;
  virtual std::optional<StagePair> load(int delta_index, int k) = 0;
  virtual void store(int delta_index, int k, const StagePair& stage) = 0;
};

/// rho0 + delta and the initial velocity from
/// -div S u0 = sqrt(rho0 + delta) g - grad p(rho0 + delta), right side
/// mean-projected (the removed mean is reported when requested).
FluidState regularize_and_initialize(const ProblemData& data, double delta,
                                     const ConstitutiveLaw& law, const PressureLaw& pressure,
                                     const LameParameter& lame, double elliptic_tol = 1e-11,
                                     int elliptic_max_iter = 200,
                                     double* projected_mean = nullptr);

/// Full Picard loop at fixed delta starting from u^0 = 0. Stops when
/// sup_t |sqrt(rho)(u^k - u^{k-1})| + sup_t |rho^k - rho^{k-1}| < tol.
std::pair<Trajectory, IterationTrace> picard(const ProblemData& data, double delta,
                                             const ConstitutiveLaw& law,
                                             const PressureLaw& pressure,
                                             const LameParameter& lame,
                                             const PicardSettings& settings,
                                             StageCache* cache = nullptr, int delta_index = 0);

struct DeltaContinuationReport {
  std::vector<double> deltas;
  std::vector<IterationTrace> traces;
  std::vector<double> u_h1_diffs;     // sup_t between consecutive deltas
  std::vector<double> rho_lq0_diffs;
  bool cauchy = false;
  bool any_triggered = false;
};

/// Runs picard along a strictly decreasing delta schedule on a shared time
/// grid and reports the continuation differences.
std::pair<Trajectory, DeltaContinuationReport> continuation_in_delta(
    const ProblemData& data, const ConstitutiveLaw& law, const PressureLaw& pressure,
    const LameParameter& lame, const std::vector<double>& delta_schedule,
    const PicardSettings& settings, double cauchy_tol, StageCache* cache = nullptr);

struct TwinReport {
  std::vector<double> times;
  std::vector<double> du_l2;
  std::vector<double> drho_l2;
  bool identical = false;  // exact bitwise equality of both trajectories
  double data_distance = 0.0;
  double max_du = 0.0;
  double max_drho = 0.0;
};

/// Runs both data sets through the same pipeline at fixed delta and
/// reports the divergence time series.
TwinReport twin_run(const ProblemData& a, const ProblemData& b, double delta,
                    const ConstitutiveLaw& law, const PressureLaw& pressure,
                    const LameParameter& lame, const PicardSettings& settings);

}  // namespace torusns

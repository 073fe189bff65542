#pragma once

#include <functional>
#include <vector>

#include "torusns/constitutive.hpp"
#include "torusns/field.hpp"

namespace torusns {

/// Density/velocity pair at one time instant with the current
/// regularization level.
struct FluidState {
  TorusField rho;
  TorusField u;
  double t = 0.0;
  double delta = 0.0;
};

/// Time-parametrized field source: analytic in tests and presets,
/// interpolated trajectory inside the Picard loop.
using TimeField = std::function<TorusField(double)>;

struct StepConfig {
  double dt = 1e-3;
  double t_end = 0.1;
  double cfl_safety = 0.8;
  double negativity_tol = 1e-6;  // relative to 1 + max rho(0)
  double implicit_tol = 1e-11;   // PCG relative tolerance per momentum step
  int implicit_max_iter = 1000;
  double rho_floor = 1e-10;  // vacuum diagnostic floor, never added as mass

  /// Called after each completed momentum step; returning false truncates
  /// the stage (the blow-up watchdog hooks in here).
  std::function<bool(double t, const TorusField& u)> watch;

  void validate() const;
  int steps() const;  // rounded t_end / dt
};

/// Uniform-in-time sequence of fields; index i sits at t0 + i*step.
class FieldSeries {
 public:
  FieldSeries() = default;
  FieldSeries(double t0, double step) : t0_(t0), step_(step) {}

  void push(TorusField f) { fields_.push_back(std::move(f)); }
  std::size_t size() const { return fields_.size(); }
  double t0() const { return t0_; }
  double step() const { return step_; }
  double t_back() const { return t0_ + step_ * (fields_.size() - 1); }
  const TorusField& operator[](std::size_t i) const { return fields_[i]; }
  TorusField& operator[](std::size_t i) { return fields_[i]; }

  /// Cubic Lagrange interpolation over the four nearest stored times
  /// (exact at stored times; one-sided near the ends).
  TorusField at_time(double t) const;

  void truncate(std::size_t new_size);

 private:
  double t0_ = 0.0;
  double step_ = 0.0;
  std::vector<TorusField> fields_;
};

/// d rho/dt = -(u . grad rho) - rho div u integrated by RK4 at step dt/2
/// (every half step is stored so the momentum stage can use midpoint
/// densities). Mass conservation and positivity are enforced as errors.
FieldSeries transport_stage(const TorusField& rho0, const TimeField& u_prev,
                            const StepConfig& cfg);

struct MomentumStageResult {
  FieldSeries u;  // full-dt samples, u[0] = u0
  bool truncated = false;
  double t_last = 0.0;
  std::vector<double> step_residuals;  // discrete momentum residual per step
  int max_cg_iterations = 0;
};

/// One linearized momentum stage: rho u_t + rho (u_prev . grad) u
/// - div S u + grad p(rho) = rho f, second-order IMEX with the
/// constant-coefficient Lame part (mu(0), lambda(0)) implicit and the
/// remainder explicit at the midpoint predictor. The implicit solve is
/// preconditioned CG with the modewise (rho_bar + tau L)^(-1) inverse.
MomentumStageResult momentum_stage(const ConstitutiveLaw& law, const PressureLaw& pressure,
                                   const FieldSeries& rho_half, const TimeField& u_prev,
                                   const TorusField& u0, const TimeField& forcing,
                                   const StepConfig& cfg);

}  // namespace torusns

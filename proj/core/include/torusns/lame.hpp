#pragma once

#include <cstdint>

#include "torusns/field.hpp"

namespace torusns {

/// Parameter of the constant-coefficient operator div D u + lambda_bar grad div u.
struct LameParameter {
  double lambda_bar = 0.0;
  /// Throws unless lambda_bar > -1/2 (projector formula and symbol
  /// inversion both need it).
  void validate() const;
};

/// Printed operator-norm bounds for the Lame solve, assembled from
/// second-order Riesz transform norms.
struct RieszConstants {
  double p = 2.0;
  int d = 3;
  double lambda_bar = 0.0;
  double C1 = 0.0;       // bound on ||grad^2 u||_Lp / ||f||_Lp
  double C2 = 0.0;       // bound on ||grad div u||_Lp / ||f||_Lp
  double C_total = 0.0;  // bound on ||grad D u|| + ||grad div u|| over ||f||
};

/// Exact modewise solve of div D u + lambda_bar grad div u = f on zero-mean
/// data: u_perp = -2 f_perp / |k|^2, u_par = -f_par / ((1+lambda_bar)|k|^2).
/// Throws NonZeroMeanError for nonzero-mean f.
TorusField solve_lame(const LameParameter& param, const TorusField& f);

/// Constants for p in [2, inf); p < 2 is rejected (no printed bound there).
RieszConstants riesz_constants(double p, int d, const LameParameter& param);

/// Max over random band-limited zero-mean right sides of
/// ||grad^2 u||_Lp / ||f||_Lp; an empirical check against C1.
double measured_operator_norm(const LameParameter& param, double p, int trials,
                              const TorusGrid& grid, std::uint64_t seed = 7);

}  // namespace torusns

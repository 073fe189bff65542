#pragma once

#include "torusns/field.hpp"

namespace torusns {

/// Lebesgue/Sobolev norms on collocation data. Multi-component fields are
/// measured through the pointwise Frobenius magnitude. L^q for finite q uses
/// the rectangle rule on samples (spectrally accurate for smooth fields);
/// q may be infinity (grid max).
double norm_lq(const TorusField& u, double q);
double norm_l2(const TorusField& u);
double norm_linf(const TorusField& u);

/// ||u||_Lq + ||grad u||_Lq
double norm_w1q(const TorusField& u, double q);
/// ||u||_Lq + ||grad u||_Lq + ||grad^2 u||_Lq
double norm_w2q(const TorusField& u, double q);

double norm_h1(const TorusField& u);
double norm_h2(const TorusField& u);

/// Negative-order norm via the multiplier (1+|k|^2)^(-1/2).
double norm_hminus1(const TorusField& u);

/// Coefficient-space L2 norm (Parseval route, used for cross-checks).
double norm_l2_spectral(const TorusField& u);

}  // namespace torusns

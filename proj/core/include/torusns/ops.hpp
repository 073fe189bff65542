#pragma once

#include "torusns/field.hpp"

namespace torusns {

/// Spectral gradient; appends the derivative index as the last component
/// axis, so grad(u)_ij = d_j u_i for a vector u. Odd-order derivative
/// multipliers zero the Nyquist mode.
TorusField grad(const TorusField& u);

/// Contracts the last component index with the derivative: for a matrix A,
/// divergence(A)_i = sum_j d_j A_ij; for a vector it is the scalar div u.
TorusField divergence(const TorusField& u);

/// D(u) = (grad u + (grad u)^T) / 2 for a vector field.
TorusField sym_grad(const TorusField& u);

TorusField laplacian(const TorusField& u);

/// Riesz transform R_j = d_j (-Delta)^(-1/2) on a zero-mean scalar field.
/// Throws NonZeroMeanError when the input mean is not negligible.
TorusField riesz(int axis, const TorusField& u);

/// Zeroes every mode with any |k_j| above dealias_fraction*(n/2). Idempotent,
/// mean-preserving.
TorusField dealias(const TorusField& u);

/// Pointwise product (no dealiasing; callers apply the 2/3 rule after
/// nonlinear work). Ranks must allow elementwise pairing: scalar*any, or
/// identical ranks multiplied componentwise.
TorusField multiply(const TorusField& a, const TorusField& b);

/// Pointwise matrix-vector contraction: (A v)_i = sum_j A_ij v_j.
TorusField contract_matrix_vector(const TorusField& A, const TorusField& v);

/// u - mean(u), componentwise.
TorusField project_zero_mean(const TorusField& u);

/// Integral over the torus of a scalar field (rectangle rule on samples,
/// spectrally accurate for smooth fields).
double integral(const TorusField& u);

/// L2 inner product sum_c int a_c b_c.
double inner_l2(const TorusField& a, const TorusField& b);

/// Fraction of spectral energy carried by modes outside the dealias band.
double high_mode_energy_fraction(const TorusField& u);

/// Verifies the field is band-limited to the dealias band within reltol;
/// throws ResolutionError otherwise.
void require_resolved(const TorusField& u, double reltol = 1e-8);

}  // namespace torusns

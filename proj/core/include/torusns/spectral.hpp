#pragma once

#include <complex>

#include "torusns/grid.hpp"

namespace torusns::detail {

/// Forward r2c transform of one component, normalized so the k=0 output is
/// the mean of the input. Thread-safe (plans are cached per (d, n) behind a
/// lock with private scratch buffers).
void fft_forward(const TorusGrid& g, const double* values, std::complex<double>* coeffs);

/// Inverse c2r transform; exact inverse of fft_forward.
void fft_backward(const TorusGrid& g, const std::complex<double>* coeffs, double* values);

/// Invokes fn(flat, k, conj_weight) for every stored half-lattice mode.
/// k is the signed wavevector (entries in [-n/2, n/2]); conj_weight is 2
/// when the mode also represents its unstored conjugate, else 1.
template <typename F>
inline void for_each_mode(const TorusGrid& g, F&& fn) {
  const int n = g.n;
  const int nc = n / 2 + 1;
  const auto wavenumber = [n](int i) { return i <= n / 2 ? i : i - n; };
  int k[3] = {0, 0, 0};
  std::size_t flat = 0;
  if (g.d == 1) {
    for (int i0 = 0; i0 < nc; ++i0, ++flat) {
      k[0] = i0;
      fn(flat, k, (i0 == 0 || i0 == n / 2) ? 1 : 2);
    }
  } else if (g.d == 2) {
    for (int i0 = 0; i0 < n; ++i0) {
      k[0] = wavenumber(i0);
      for (int i1 = 0; i1 < nc; ++i1, ++flat) {
        k[1] = i1;
        fn(flat, k, (i1 == 0 || i1 == n / 2) ? 1 : 2);
      }
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      k[0] = wavenumber(i0);
      for (int i1 = 0; i1 < n; ++i1) {
        k[1] = wavenumber(i1);
        for (int i2 = 0; i2 < nc; ++i2, ++flat) {
          k[2] = i2;
          fn(flat, k, (i2 == 0 || i2 == n / 2) ? 1 : 2);
        }
      }
    }
  }
}

}  // namespace torusns::detail

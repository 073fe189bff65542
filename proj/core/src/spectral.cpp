#include "torusns/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace torusns::detail {
namespace {

// One cached plan pair per (d, n). Execution copies through private scratch
// buffers under the entry lock: FFTW planning is not thread-safe and c2r
// destroys its input, so the copy keeps every public operation reentrant.
struct PlanEntry {
  PlanEntry(int d, int n) {
    int dims[3] = {n, n, n};
    npoints = 1;
    for (int i = 0; i < d; ++i) npoints *= static_cast<std::size_t>(n);
    nmodes = npoints / n * (n / 2 + 1);
    real = fftw_alloc_real(npoints);
    cplx = fftw_alloc_complex(nmodes);
    fwd = fftw_plan_dft_r2c(d, dims, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r(d, dims, cplx, real, FFTW_ESTIMATE);
  }
  ~PlanEntry() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  PlanEntry(const PlanEntry&) = delete;

  std::size_t npoints = 0;
  std::size_t nmodes = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::mutex mu;
};

PlanEntry& entry_for(const TorusGrid& g) {
  static std::mutex registry_mu;
  static std::map<std::pair<int, int>, std::unique_ptr<PlanEntry>> registry;
  std::scoped_lock lock(registry_mu);
  auto& slot = registry[{g.d, g.n}];
  if (!slot) slot = std::make_unique<PlanEntry>(g.d, g.n);
  return *slot;
}

}  // namespace

void fft_forward(const TorusGrid& g, const double* values, std::complex<double>* coeffs) {
  PlanEntry& e = entry_for(g);
  std::scoped_lock lock(e.mu);
  std::memcpy(e.real, values, e.npoints * sizeof(double));
  fftw_execute(e.fwd);
  const double scale = 1.0 / static_cast<double>(e.npoints);
  for (std::size_t i = 0; i < e.nmodes; ++i)
    coeffs[i] = std::complex<double>(e.cplx[i][0] * scale, e.cplx[i][1] * scale);
}

void fft_backward(const TorusGrid& g, const std::complex<double>* coeffs, double* values) {
  PlanEntry& e = entry_for(g);
  std::scoped_lock lock(e.mu);
  for (std::size_t i = 0; i < e.nmodes; ++i) {
    e.cplx[i][0] = coeffs[i].real();
    e.cplx[i][1] = coeffs[i].imag();
  }
  fftw_execute(e.bwd);
  std::memcpy(values, e.real, e.npoints * sizeof(double));
}

}  // namespace torusns::detail

#include "torusns/lame.hpp"

#include <cmath>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"
#include "torusns/random_field.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

void LameParameter::validate() const {
  if (!(lambda_bar > -0.5))
    throw std::invalid_argument("lame: lambda_bar must exceed -1/2");
}

TorusField solve_lame(const LameParameter& param, const TorusField& f) {
  param.validate();
  if (f.rank() != Rank::Vector) throw std::invalid_argument("solve_lame: vector field expected");
  const TorusGrid& g = f.grid();
  const int d = g.d;
  const std::size_t nm = g.modes();

  double maxmag = 0.0;
  for (int c = 0; c < d; ++c) {
    auto fc = f.coeffs(c);
    for (auto z : fc) maxmag = std::max(maxmag, std::abs(z));
    if (std::abs(fc[0]) > 1e-12 * (1.0 + maxmag))
      throw NonZeroMeanError("solve_lame: right side must have zero mean");
  }

  TorusField u(g, Rank::Vector);
  std::vector<std::span<const std::complex<double>>> fc(d);
  std::vector<std::span<std::complex<double>>> uc(d);
  for (int c = 0; c < d; ++c) fc[c] = f.coeffs(c);
  for (int c = 0; c < d; ++c) uc[c] = u.coeffs_mut(c);

  const double a_par = 1.0 + param.lambda_bar;
  detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
    double k2 = 0.0;
    for (int j = 0; j < d; ++j) k2 += static_cast<double>(k[j]) * k[j];
    if (k2 == 0.0) {
      for (int c = 0; c < d; ++c) uc[c][flat] = 0.0;
      return;
    }
    std::complex<double> kdotf(0.0, 0.0);
    for (int j = 0; j < d; ++j) kdotf += static_cast<double>(k[j]) * fc[j][flat];
    for (int c = 0; c < d; ++c) {
      const std::complex<double> f_par = kdotf * (static_cast<double>(k[c]) / k2);
      const std::complex<double> f_perp = fc[c][flat] - f_par;
      uc[c][flat] = (-2.0 * f_perp - f_par / a_par) / k2;
    }
  });
  (void)nm;
  return u;
}

RieszConstants riesz_constants(double p, int d, const LameParameter& param) {
  param.validate();
  if (!(p >= 2.0))
    throw std::invalid_argument("riesz_constants: p < 2 unsupported (no printed bound)");
  if (d < 1 || d > 3) throw std::invalid_argument("riesz_constants: d must be 1, 2, or 3");

  RieszConstants rc;
  rc.p = p;
  rc.d = d;
  rc.lambda_bar = param.lambda_bar;
  const double theta = (1.0 + 2.0 * param.lambda_bar) / (2.0 + 2.0 * param.lambda_bar);
  const double dd = static_cast<double>(d);
  if (p == 2.0) {
    // ||R_k R_l|| <= 1 and ||(R_i R_j)_ij|| = 1
    rc.C1 = 2.0 * dd * dd * (1.0 + theta);
    rc.C2 = 2.0 * (1.0 + theta);
    rc.C_total = (dd * dd + 1.0) * (1.0 + theta);
  } else {
    const double r1 = p - 1.0;       // ||R_k R_l||
    const double rp = dd * (p - 1.0);  // ||(R_i R_j)_ij||
    rc.C1 = 2.0 * dd * dd * r1 * (1.0 + theta * rp);
    rc.C2 = 2.0 * (rp + theta * rp);
    rc.C_total = dd * dd * (p - 1.0) * (1.0 + theta * dd * (p - 1.0)) +
                 dd * (p - 1.0) * (1.0 + theta);
  }
  return rc;
}

double measured_operator_norm(const LameParameter& param, double p, int trials,
                              const TorusGrid& grid, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("measured_operator_norm: trials must be >= 1");
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    RandomSpec spec;
    spec.seed = seed;
    spec.stream = static_cast<std::uint64_t>(t);
    spec.kmax = grid.dealias_cutoff();
    TorusField f = random_band_limited(grid, Rank::Vector, spec);
    const double fn = norm_lq(f, p);
    if (fn == 0.0) continue;
    TorusField u = solve_lame(param, f);
    const double ratio = norm_lq(grad(grad(u)), p) / fn;
    worst = std::max(worst, ratio);
  }
  return worst;
}

}  // namespace torusns

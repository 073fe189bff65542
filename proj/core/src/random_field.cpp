#include "torusns/random_field.hpp"

#include <algorithm>
#include <cmath>

#include "torusns/spectral.hpp"

namespace torusns {

namespace detail {

std::uint64_t hash64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_pm1(std::uint64_t h) {
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

namespace {
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return hash64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}
}  // namespace

}  // namespace detail

TorusField random_band_limited(const TorusGrid& g, Rank rank, const RandomSpec& spec) {
  g.validate();
  TorusField out(g, rank);
  const int d = g.d;
  // Nyquist excluded so derivative multipliers act exactly on every mode.
  const int kmax = std::min(spec.kmax, g.nyquist() - 1);
  const int kmin = std::max(spec.kmin, spec.zero_mean ? 1 : 0);

  const std::uint64_t base = detail::mix(detail::hash64(spec.seed), spec.stream);
  for (int c = 0; c < out.ncomp(); ++c) {
    auto dst = out.coeffs_mut(c);
    const std::uint64_t comp_key = detail::mix(base, static_cast<std::uint64_t>(c));
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
      int kinf = 0;
      for (int j = 0; j < d; ++j) kinf = std::max(kinf, std::abs(k[j]));
      if (kinf < kmin || kinf > kmax) {
        dst[flat] = 0.0;
        return;
      }
      // Hash the canonical representative of {k, -k} so Hermitian partners
      // in the k_last = 0 plane receive conjugate values.
      bool negate = false;
      bool self_conjugate = true;
      for (int j = 0; j < d; ++j) {
        if (k[j] != 0) {
          self_conjugate = false;
          if (k[j] < 0) negate = true;
          break;
        }
      }
      std::uint64_t key = comp_key;
      for (int j = 0; j < d; ++j) {
        const int kc = negate ? -k[j] : k[j];
        key = detail::mix(key, static_cast<std::uint64_t>(kc + 512));
      }
      double k2 = 0.0;
      for (int j = 0; j < d; ++j) k2 += static_cast<double>(k[j]) * k[j];
      const double amp = spec.amplitude * std::pow(1.0 + k2, -0.5 * spec.decay);
      const double re = amp * detail::uniform_pm1(detail::hash64(key ^ 0x517cc1b727220a95ULL));
      double im = amp * detail::uniform_pm1(detail::hash64(key ^ 0x2545f4914f6cdd1dULL));
      if (self_conjugate) im = 0.0;
      dst[flat] = std::complex<double>(re, negate ? -im : im);
    });
  }
  if (spec.zero_mean) out.set_zero_mean(true);
  return out;
}

}  // namespace torusns

// SPDX-License-Identifier: Apache-2.0
// Measurement helpers shared by the unit and acceptance suites.
#pragma once

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace fadecast::testing {

using cd = std::complex<double>;

inline std::vector<cd> fft(std::vector<cd> in, int sign) {
  std::vector<cd> out(in.size());
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(in.size()), reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  return out;
}

/// Unbiased linear autocorrelation r(k) = mean_t h(t+k) conj(h(t)),
/// normalized by r(0), for k < max_lag.
inline std::vector<double> empirical_acf(std::span<const cd> h, std::size_t max_lag) {
  const std::size_t n = h.size();
  const std::size_t len = std::bit_ceil(2 * n);
  std::vector<cd> buf(len);
  for (std::size_t i = 0; i < n; ++i) buf[i] = h[i];
  auto spec = fft(std::move(buf), FFTW_FORWARD);
  for (auto& v : spec) v = std::norm(v);
  auto r = fft(std::move(spec), FFTW_BACKWARD);
  std::vector<double> acf(max_lag);
  const double r0 = r[0].real() / static_cast<double>(n);
  for (std::size_t k = 0; k < max_lag; ++k)
    acf[k] = (r[k].real() / static_cast<double>(n - k)) / r0;
  return acf;
}

/// Fraction of periodogram power in bins with |f| > f_max (cycles/sample).
inline double out_of_band_fraction(std::span<const cd> h, double f_max) {
  std::vector<cd> buf(h.begin(), h.end());
  auto spec = fft(std::move(buf), FFTW_FORWARD);
  const double n = static_cast<double>(spec.size());
  double total = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double f = static_cast<double>(k) / n;
    if (f >= 0.5) f -= 1.0;
    const double p = std::norm(spec[k]);
    total += p;
    // A bin counts as outside only when its whole interval is.
    if (std::fabs(f) - 0.5 / n > f_max) outside += p;
  }
  return outside / total;
}

struct Moments {
  double mean, var, skew, excess_kurtosis;
};

inline Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {m, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace fadecast::testing

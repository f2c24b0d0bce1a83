// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors
//
// Test-only reference computations, kept independent of the library code
// paths they are used to check.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace oracles {

// Direct O(N^2) unitary inverse DFT.
inline std::vector<std::complex<double>> naive_idft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = 2.0 * M_PI * static_cast<double>(t) * static_cast<double>(k) /
                           static_cast<double>(n);
      acc += x[k] * std::polar(1.0, phase);
    }
    out[t] = acc * scale;
  }
  return out;
}

// Direct O(N^2) unitary forward DFT.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& u) {
  const std::size_t n = u.size();
  std::vector<std::complex<double>> out(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double phase = -2.0 * M_PI * static_cast<double>(t) * static_cast<double>(k) /
                           static_cast<double>(n);
      acc += u[t] * std::polar(1.0, phase);
    }
    out[k] = acc * scale;
  }
  return out;
}

// Exact first and second moments of a clipped uniform mid-rise quantizer
// driven by a zero-mean Gaussian with standard deviation sigma, via
// per-interval closed forms of the Gaussian integrals.
struct QuantizerMoments {
  double gain = 0.0;           // E[q(V) V] / E[V^2]
  double mse_about_gain = 0.0; // E[(q(V) - gain * V)^2]
  double mse = 0.0;            // E[(q(V) - V)^2]
};

inline QuantizerMoments gaussian_midrise_moments(int bits, double full_scale, double sigma) {
  const long levels = 1L << bits;
  const double step = 2.0 * full_scale / static_cast<double>(levels);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto cdf = [&](double v) { return 0.5 * std::erfc(-v / sigma * inv_sqrt2); };
  auto pdf = [&](double v) {
    return std::exp(-v * v / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
  };

  double e_q2 = 0.0;
  double e_qv = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (long k = -levels / 2; k <= levels / 2 - 1; ++k) {
    const double lo = (k == -levels / 2) ? -inf : static_cast<double>(k) * step;
    const double hi = (k == levels / 2 - 1) ? inf : static_cast<double>(k + 1) * step;
    const double level = (static_cast<double>(k) + 0.5) * step;
    const double prob = cdf(hi) - cdf(lo);
    // int_lo^hi v phi(v) dv = sigma^2 (phi(lo) - phi(hi))
    const double lo_pdf = std::isinf(lo) ? 0.0 : pdf(lo);
    const double hi_pdf = std::isinf(hi) ? 0.0 : pdf(hi);
    const double ev = sigma * sigma * (lo_pdf - hi_pdf);
    e_q2 += level * level * prob;
    e_qv += level * ev;
  }
  QuantizerMoments m;
  m.gain = e_qv / (sigma * sigma);
  m.mse_about_gain = e_q2 - m.gain * m.gain * sigma * sigma;
  m.mse = e_q2 - 2.0 * e_qv + sigma * sigma;
  return m;
}

}  // namespace oracles

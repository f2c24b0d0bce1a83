// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/core.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace aci {

double db_to_linear(double x_db) {
  if (!std::isfinite(x_db)) {
    throw std::invalid_argument("db_to_linear: input must be finite");
  }
  return std::pow(10.0, x_db / 10.0);
}

double linear_to_db(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("linear_to_db: input must be positive");
  }
  return 10.0 * std::log10(x);
}

double dbm_to_watts(double p_dbm) {
  if (!std::isfinite(p_dbm)) {
    throw std::invalid_argument("dbm_to_watts: input must be finite");
  }
  return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

double watts_to_dbm(double p_watts) {
  if (!(p_watts > 0.0)) {
    throw std::domain_error("watts_to_dbm: input must be positive");
  }
  return 10.0 * std::log10(p_watts) + 30.0;
}

SnrPair::SnrPair(double sig, double intf) : gamma_sig(sig), gamma_int(intf) {
  if (!(sig >= 0.0) || !(intf >= 0.0)) {
    throw std::invalid_argument("SnrPair: ratios must be >= 0");
  }
}

SaturationModel::SaturationModel(double beta_, double alpha1_, double alpha2_)
    : beta(beta_), alpha1(alpha1_), alpha2(alpha2_) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("SaturationModel: beta must be > 0");
  }
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) {
    throw std::invalid_argument("SaturationModel: alpha1/alpha2 must be >= 0");
  }
}

FrequencyPlan::FrequencyPlan(std::size_t n_fft, std::vector<std::uint32_t> sig_bins,
                             std::vector<std::uint32_t> int_bins, double sample_rate_hz)
    : n_fft_(n_fft),
      sig_bins_(std::move(sig_bins)),
      int_bins_(std::move(int_bins)),
      sample_rate_hz_(sample_rate_hz) {
  if (n_fft_ == 0) {
    throw std::invalid_argument("FrequencyPlan: n_fft must be > 0");
  }
  if (!(sample_rate_hz_ > 0.0)) {
    throw std::invalid_argument("FrequencyPlan: sample_rate_hz must be > 0");
  }
  if (sig_bins_.size() + int_bins_.size() != n_fft_) {
    throw std::invalid_argument("FrequencyPlan: bin sets must partition the FFT grid");
  }
  sig_mask_.assign(n_fft_, 0);
  std::vector<std::uint8_t> seen(n_fft_, 0);
  for (std::uint32_t b : sig_bins_) {
    if (b >= n_fft_ || seen[b]) {
      throw std::invalid_argument("FrequencyPlan: invalid or duplicate signal bin");
    }
    seen[b] = 1;
    sig_mask_[b] = 1;
  }
  for (std::uint32_t b : int_bins_) {
    if (b >= n_fft_ || seen[b]) {
      throw std::invalid_argument("FrequencyPlan: bin sets overlap or exceed the grid");
    }
    seen[b] = 1;
  }
  std::sort(sig_bins_.begin(), sig_bins_.end());
  std::sort(int_bins_.begin(), int_bins_.end());
}

FrequencyPlan FrequencyPlan::contiguous_halves(std::size_t n_fft, double sample_rate_hz) {
  if (n_fft < 2 || (n_fft % 2) != 0) {
    throw std::invalid_argument("FrequencyPlan: contiguous_halves needs an even n_fft >= 2");
  }
  std::vector<std::uint32_t> sig(n_fft / 2);
  std::vector<std::uint32_t> intf(n_fft / 2);
  for (std::size_t i = 0; i < n_fft / 2; ++i) {
    sig[i] = static_cast<std::uint32_t>(i);
    intf[i] = static_cast<std::uint32_t>(i + n_fft / 2);
  }
  return FrequencyPlan(n_fft, std::move(sig), std::move(intf), sample_rate_hz);
}

const char* design_name(Design d) {
  switch (d) {
    case Design::rx28_d1:
      return "28-d1";
    case Design::rx28_d2:
      return "28-d2";
    case Design::rx140_d1:
      return "140-d1";
    case Design::rx140_d2:
      return "140-d2";
  }
  return "?";
}

std::optional<Design> parse_design(std::string_view s) {
  for (Design d : kAllDesigns) {
    if (s == design_name(d)) {
      return d;
    }
  }
  return std::nullopt;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double u64_to_unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

std::uint64_t derive_state(Seed seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed.value);
  for (std::uint64_t p : path) {
    h = mix64(h ^ p);
  }
  return h;
}

Rng derive_rng(Seed seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_state(seed, path));
}

Rng::Rng(std::uint64_t state) : engine_(state) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return u64_to_unit_double(next_u64()); }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  // Box-Muller; one fresh pair per call keeps the draw sequence simple.
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * M_PI * u2);
}

std::complex<double> Rng::cnormal() {
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-std::log1p(-u1));  // E|z|^2 = 1
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::uniform_index: n must be > 0");
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) {
    throw std::invalid_argument("Rng::poisson: mean must be >= 0");
  }
  // Knuth's product method; halving keeps exp(-mean) representable and the
  // sum of independent Poisson halves is exact in distribution.
  if (mean > 500.0) {
    return poisson(mean / 2.0) + poisson(mean / 2.0);
  }
  const double limit = std::exp(-mean);
  std::uint64_t count = 0;
  double product = uniform();
  while (product > limit) {
    ++count;
    product *= uniform();
  }
  return count;
}

void parallel_for(std::size_t n, unsigned n_threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) {
    return;
  }
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) {
          fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

}  // namespace aci

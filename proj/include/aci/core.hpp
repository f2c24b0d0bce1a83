// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aci {

// Physical constants (SI).
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kReferenceTempK = 290.0;       // standard RF reference
inline constexpr double kThermalNoiseDensity = kBoltzmann * kReferenceTempK;  // W/Hz

// dB / dBm conversions.
double db_to_linear(double x_db);     // 10^(x/10); throws on non-finite input
double linear_to_db(double x);        // 10*log10(x); throws on x <= 0
double dbm_to_watts(double p_dbm);    // 10^((p-30)/10); throws on non-finite input
double watts_to_dbm(double p_watts);  // inverse of dbm_to_watts; throws on p <= 0

// 64-bit seed for every stochastic operation. Equal seeds and equal inputs
// give bit-identical results.
struct Seed {
  std::uint64_t value = 0;
};

// Per-bin signal- and interference-to-noise ratios (linear power ratios).
struct SnrPair {
  double gamma_sig = 0.0;
  double gamma_int = 0.0;

  SnrPair() = default;
  SnrPair(double sig, double intf);
};

// Fitted three-parameter input/output SNR relation
//   gamma_out = beta * gamma_sig / (1 + alpha1 * gamma_sig + alpha2 * gamma_int)
struct SaturationModel {
  double beta = 1.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  SaturationModel() = default;
  SaturationModel(double beta_, double alpha1_, double alpha2_);
};

// OFDM-style bin layout: the signal occupies sig_bins, interference occupies
// int_bins, and together they partition {0 .. n_fft-1}.
class FrequencyPlan {
 public:
  FrequencyPlan(std::size_t n_fft, std::vector<std::uint32_t> sig_bins,
                std::vector<std::uint32_t> int_bins, double sample_rate_hz);

  // Lower half signal, upper half interference.
  static FrequencyPlan contiguous_halves(std::size_t n_fft, double sample_rate_hz);

  std::size_t n_fft() const { return n_fft_; }
  std::size_t n_sig() const { return sig_bins_.size(); }
  double sample_rate_hz() const { return sample_rate_hz_; }
  const std::vector<std::uint32_t>& sig_bins() const { return sig_bins_; }
  const std::vector<std::uint32_t>& int_bins() const { return int_bins_; }
  bool is_signal_bin(std::uint32_t bin) const { return sig_mask_[bin] != 0; }

 private:
  std::size_t n_fft_ = 0;
  std::vector<std::uint32_t> sig_bins_;
  std::vector<std::uint32_t> int_bins_;
  std::vector<std::uint8_t> sig_mask_;
  double sample_rate_hz_ = 0.0;
};

// The four built-in receiver designs.
enum class Design { rx28_d1, rx28_d2, rx140_d1, rx140_d2 };

inline constexpr Design kAllDesigns[] = {Design::rx28_d1, Design::rx28_d2,
                                         Design::rx140_d1, Design::rx140_d2};

const char* design_name(Design d);                       // "28-d1", ...
std::optional<Design> parse_design(std::string_view s);  // nullopt if unknown

// Deterministic generator. Streams derived with distinct paths from the same
// root seed are independent for simulation purposes, so parallel workers can
// each own a stream without coordination.
class Rng {
 public:
  explicit Rng(std::uint64_t state);

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  double uniform(double a, double b);  // [a, b)
  double normal();                     // N(0, 1)
  std::complex<double> cnormal();      // circular complex, unit variance
  std::size_t uniform_index(std::size_t n);  // unbiased in [0, n)
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// Keyed stream derivation (root seed + integer path -> independent stream).
Rng derive_rng(Seed seed, std::initializer_list<std::uint64_t> path);
std::uint64_t derive_state(Seed seed, std::initializer_list<std::uint64_t> path);

// Stateless mixing step used by derive_rng; exposed for lightweight
// counter-based draws.
std::uint64_t mix64(std::uint64_t x);
double u64_to_unit_double(std::uint64_t x);  // [0, 1)

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// output is independent of scheduling. Rethrows the first worker exception.
void parallel_for(std::size_t n, unsigned n_threads, const std::function<void(std::size_t)>& fn);

}  // namespace aci

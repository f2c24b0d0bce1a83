// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aci/core.hpp"

namespace aci::rffe {

using cvec = std::vector<std::complex<double>>;

// One analog stage (LNA, mixer, ...). A stage without an IIP3 is ideal and
// only applies gain.
struct StageSpec {
  std::string name;
  double gain_db = 0.0;
  double nf_db = 0.0;
  std::optional<double> iip3_dbm;
  double power_mw = 0.0;  // metadata only
};

void validate(const StageSpec& stage);

// Full receive chain: analog stages in order, ideal batch AGC, then a pair of
// uniform mid-rise ADCs on I/Q.
struct RffeChainSpec {
  std::vector<StageSpec> stages;
  int adc_bits = 14;
  double adc_loading_sigma = 3.0;  // clip point in units of per-component RMS
  double agc_target = 1.0;         // mean power at the ADC input after scaling
};

void validate(const RffeChainSpec& chain);

// Frozen minimum-MSE clip points for Gaussian input (see quantizer tests).
inline constexpr double kAdcLoading4Bit = 2.34;
inline constexpr double kAdcLoading5Bit = 2.94;

// Built-in chains for the four receiver designs.
RffeChainSpec builtin_chain(Design d);

// Transmitted frame paired with what came out of the chain, both in the
// frequency domain.
struct FrameBatch {
  cvec tx_freq;
  cvec rx_freq;
  FrequencyPlan plan;
};

// Frequency-domain frame: signal bins are i.i.d. circular Gaussian with
// variance gamma_sig, interference bins with variance gamma_int.
cvec generate_frame(const FrequencyPlan& plan, const SnrPair& snr, Seed seed);

// Unitary DFT pair: norms are preserved either way.
cvec to_time_domain(std::span<const std::complex<double>> x);
cvec to_freq_domain(std::span<const std::complex<double>> u);

// Memoryless cubic with gain: y = g * (u - c3 * u * |u|^2), saturated at the
// cubic's peak so the AM/AM curve is monotone and never folds over.
cvec apply_nonlinearity(std::span<const std::complex<double>> u, double gain_db,
                        double iip3_dbm, double ref_impedance_ohm = 50.0);

// Constants behind apply_nonlinearity, exposed for verification.
double iip3_peak_amplitude(double iip3_dbm, double ref_impedance_ohm = 50.0);   // A: A^2 = 2*P*R
double cubic_coefficient(double iip3_dbm, double ref_impedance_ohm = 50.0);     // c3 = 4/(3*A^2)
double saturation_input_amplitude(double iip3_dbm, double ref_impedance_ohm = 50.0);  // A/2

// Adds circular complex Gaussian noise of per-sample power
// (F - 1) * input_noise_power, F = 10^(nf/10). nf = 0 returns the input
// unchanged.
cvec add_stage_noise(std::span<const std::complex<double>> u, double nf_db,
                     double input_noise_power, Seed seed);

// Independent uniform mid-rise quantizers on I and Q with full scale
// loading_sigma times the per-component RMS of u. Zero input passes through.
cvec quantize(std::span<const std::complex<double>> u, int bits, double loading_sigma);

// Same quantizer with an externally fixed full scale (used batch-wide by
// simulate_chain).
cvec quantize_with_full_scale(std::span<const std::complex<double>> u, int bits,
                              double full_scale);

// End-to-end frame simulation: generate, IDFT, analog stages with per-stage
// noise on top of the thermal floor, batch AGC, batch-scaled quantizer, DFT.
// Frame f draws from streams derived from (seed, f) only.
std::vector<FrameBatch> simulate_chain(const FrequencyPlan& plan, const RffeChainSpec& chain,
                                       const SnrPair& snr, std::size_t n_frames, Seed seed);

// Friis cascade: F = F1 + sum_k (Fk - 1) / prod_{j<k} Gj, returned in dB.
double cascade_noise_figure(std::span<const StageSpec> stages);

// Input-referred cascade intercept: 1/P = sum_k prod_{j<k} Gj / Pk, in dBm.
// Every stage must carry an IIP3.
double cascade_iip3_dbm(std::span<const StageSpec> stages);

}  // namespace aci::rffe

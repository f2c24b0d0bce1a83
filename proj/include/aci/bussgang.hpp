// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aci/core.hpp"

namespace aci::bussgang {

// Thrown when a fitting design cannot pin down all three parameters.
class identifiability_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sample linearization of a channel: x_hat ~ a * x + residual, with residual
// power tau and zero sample correlation between residual and x.
struct BussgangEstimate {
  std::complex<double> a{0.0, 0.0};
  double tau = 0.0;
  std::size_t n_samples = 0;
};

// One point of the input/output SNR relation (all linear ratios).
struct SnrMeasurement {
  double gamma_sig = 0.0;
  double gamma_int = 0.0;
  double gamma_out = 0.0;
};

struct FitReport {
  SaturationModel model;
  double residual_norm = 0.0;  // l2 norm of the dB-domain residual vector
  int iterations = 0;
  bool converged = false;
};

// Least-squares gain a = sum(x_hat * conj(x)) / sum(|x|^2) and residual power
// tau = mean |x_hat - a x|^2. Needs >= 2 pairs and non-degenerate x.
BussgangEstimate estimate_bussgang(
    std::span<const std::pair<std::complex<double>, std::complex<double>>> pairs);

// gamma_out = |a|^2 * gamma_sig / tau. tau == 0 reports +infinity.
double output_snr(const BussgangEstimate& est, double gamma_sig);

// gamma_hat = beta * gamma_sig / (1 + alpha1 * gamma_sig + alpha2 * gamma_int)
double model_predict(const SaturationModel& model, const SnrPair& snr);

// Starting point beta = 1/F, alpha1 = alpha2 = 1/(gamma_sat * F).
SaturationModel heuristic_init(double noise_factor, double gamma_sat);

// heuristic_init with gamma_sat taken as max observed gamma_out times F.
SaturationModel init_from_measurements(std::span<const SnrMeasurement> measurements,
                                       double noise_factor);

// Damped Gauss-Newton on log-parameters, minimizing the sum of squared
// dB-domain residuals. Throws identifiability_error when the measurements
// cannot separate the parameters.
FitReport fit_model(std::span<const SnrMeasurement> measurements, const SaturationModel& init);

// C >= (n_sig * zeta / n_fft) * fs * log2(1 + gamma_out / zeta), bits/s.
double capacity_lower_bound(double gamma_out, double fs_hz, std::size_t n_sig,
                            std::size_t n_fft, double zeta);

}  // namespace aci::bussgang

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/bussgang.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace aci::bussgang {

namespace {

constexpr double kGradientTol = 1e-8;
constexpr double kStepTol = 1e-10;
constexpr int kMaxIterations = 200;
constexpr double kDbScale = 10.0 / M_LN10;  // d(10*log10 v)/d(ln v)

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::size_t count_distinct(std::span<const SnrMeasurement> ms, double SnrMeasurement::*field) {
  std::vector<double> vals;
  vals.reserve(ms.size());
  for (const auto& m : ms) {
    vals.push_back(m.*field);
  }
  std::sort(vals.begin(), vals.end());
  std::size_t distinct = vals.empty() ? 0 : 1;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (!nearly_equal(vals[i], vals[i - 1])) {
      ++distinct;
    }
  }
  return distinct;
}

// Solves the symmetric positive-definite 3x3 system H x = b in place.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> h, std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(h[r][col]) > std::abs(h[pivot][col])) {
        pivot = r;
      }
    }
    std::swap(h[col], h[pivot]);
    std::swap(b[col], b[pivot]);
    if (h[col][col] == 0.0) {
      throw std::runtime_error("fit_model: singular normal equations");
    }
    for (int r = col + 1; r < 3; ++r) {
      const double m = h[r][col] / h[col][col];
      for (int c = col; c < 3; ++c) {
        h[r][c] -= m * h[col][c];
      }
      b[r] -= m * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) {
      s -= h[r][c] * x[c];
    }
    x[r] = s / h[r][r];
  }
  return x;
}

struct LogParams {
  // theta = (ln beta, ln alpha1, ln alpha2)
  std::array<double, 3> theta;

  SaturationModel model() const {
    return SaturationModel(std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2]));
  }
};

double sum_squared_residuals(std::span<const SnrMeasurement> ms, const SaturationModel& m) {
  double sse = 0.0;
  for (const auto& p : ms) {
    const double pred = model_predict(m, SnrPair(p.gamma_sig, p.gamma_int));
    const double r = linear_to_db(p.gamma_out) - linear_to_db(pred);
    sse += r * r;
  }
  return sse;
}

}  // namespace

BussgangEstimate estimate_bussgang(
    std::span<const std::pair<std::complex<double>, std::complex<double>>> pairs) {
  if (pairs.size() < 2) {
    throw std::invalid_argument("estimate_bussgang: need at least 2 pairs");
  }
  std::complex<double> cross{0.0, 0.0};
  double energy = 0.0;
  for (const auto& [x, xhat] : pairs) {
    cross += xhat * std::conj(x);
    energy += std::norm(x);
  }
  if (energy <= 0.0) {
    throw std::invalid_argument("estimate_bussgang: degenerate input, sum |x|^2 is zero");
  }
  const std::complex<double> a = cross / energy;
  double resid = 0.0;
  for (const auto& [x, xhat] : pairs) {
    resid += std::norm(xhat - a * x);
  }
  return BussgangEstimate{a, resid / static_cast<double>(pairs.size()), pairs.size()};
}

double output_snr(const BussgangEstimate& est, double gamma_sig) {
  if (!(gamma_sig >= 0.0)) {
    throw std::invalid_argument("output_snr: gamma_sig must be >= 0");
  }
  if (est.tau < 0.0) {
    throw std::invalid_argument("output_snr: tau must be >= 0");
  }
  if (est.tau == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return std::norm(est.a) * gamma_sig / est.tau;
}

double model_predict(const SaturationModel& model, const SnrPair& snr) {
  return model.beta * snr.gamma_sig /
         (1.0 + model.alpha1 * snr.gamma_sig + model.alpha2 * snr.gamma_int);
}

SaturationModel heuristic_init(double noise_factor, double gamma_sat) {
  if (!(noise_factor >= 1.0)) {
    throw std::invalid_argument("heuristic_init: noise factor must be >= 1");
  }
  if (!(gamma_sat > 0.0)) {
    throw std::invalid_argument("heuristic_init: gamma_sat must be > 0");
  }
  const double alpha = 1.0 / (gamma_sat * noise_factor);
  return SaturationModel(1.0 / noise_factor, alpha, alpha);
}

SaturationModel init_from_measurements(std::span<const SnrMeasurement> measurements,
                                       double noise_factor) {
  double max_out = 0.0;
  for (const auto& m : measurements) {
    max_out = std::max(max_out, m.gamma_out);
  }
  if (!(max_out > 0.0)) {
    throw std::invalid_argument("init_from_measurements: no positive gamma_out observed");
  }
  return heuristic_init(noise_factor, max_out * noise_factor);
}

FitReport fit_model(std::span<const SnrMeasurement> measurements, const SaturationModel& init) {
  if (measurements.size() < 3) {
    throw identifiability_error("fit_model: need at least 3 measurements");
  }
  if (count_distinct(measurements, &SnrMeasurement::gamma_sig) < 2) {
    throw identifiability_error(
        "fit_model: gamma_sig takes a single value; beta and alpha1 are not identifiable");
  }
  if (count_distinct(measurements, &SnrMeasurement::gamma_int) < 2) {
    throw identifiability_error(
        "fit_model: gamma_int takes a single value; alpha2 is not identifiable");
  }
  for (const auto& m : measurements) {
    if (!(m.gamma_out > 0.0) || !std::isfinite(m.gamma_out) || !(m.gamma_sig > 0.0) ||
        !(m.gamma_int >= 0.0)) {
      throw std::invalid_argument(
          "fit_model: measurements need gamma_sig > 0, gamma_int >= 0 and finite gamma_out > 0");
    }
  }

  LogParams p;
  p.theta = {std::log(std::max(init.beta, 1e-12)), std::log(std::max(init.alpha1, 1e-12)),
             std::log(std::max(init.alpha2, 1e-12))};
  double sse = sum_squared_residuals(measurements, p.model());
  double damping = 1e-3;

  FitReport report;
  report.converged = false;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const SaturationModel m = p.model();
    std::array<double, 3> grad{};                    // J^T r
    std::array<std::array<double, 3>, 3> hess{};     // J^T J
    for (const auto& pt : measurements) {
      const double denom = 1.0 + m.alpha1 * pt.gamma_sig + m.alpha2 * pt.gamma_int;
      const double pred = m.beta * pt.gamma_sig / denom;
      const double r = linear_to_db(pt.gamma_out) - linear_to_db(pred);
      // Residual derivative w.r.t. (ln beta, ln alpha1, ln alpha2).
      const std::array<double, 3> j = {-kDbScale, kDbScale * m.alpha1 * pt.gamma_sig / denom,
                                       kDbScale * m.alpha2 * pt.gamma_int / denom};
      for (int a = 0; a < 3; ++a) {
        grad[a] += j[a] * r;
        for (int b = 0; b < 3; ++b) {
          hess[a][b] += j[a] * j[b];
        }
      }
    }
    const double grad_norm = std::max({std::abs(grad[0]), std::abs(grad[1]), std::abs(grad[2])});
    if (grad_norm < kGradientTol) {
      report.converged = true;
      break;
    }

    bool stepped = false;
    bool small_step = false;
    for (int attempt = 0; attempt < 60 && !stepped; ++attempt) {
      auto damped = hess;
      for (int a = 0; a < 3; ++a) {
        damped[a][a] += damping * std::max(hess[a][a], 1e-12);
      }
      std::array<double, 3> delta = solve3(damped, {-grad[0], -grad[1], -grad[2]});
      LogParams trial = p;
      double step_norm = 0.0;
      for (int a = 0; a < 3; ++a) {
        trial.theta[a] += delta[a];
        step_norm = std::max(step_norm, std::abs(delta[a]));
      }
      const double trial_sse = sum_squared_residuals(measurements, trial.model());
      if (trial_sse <= sse) {
        p = trial;
        sse = trial_sse;
        damping = std::max(damping / 3.0, 1e-12);
        stepped = true;
        small_step = step_norm < kStepTol;
      } else {
        damping *= 4.0;
      }
    }
    if (!stepped) {
      break;  // damping exhausted without progress
    }
    if (small_step) {
      report.converged = true;
      ++iter;
      break;
    }
  }

  report.model = p.model();
  report.residual_norm = std::sqrt(sse);
  report.iterations = iter;
  return report;
}

double capacity_lower_bound(double gamma_out, double fs_hz, std::size_t n_sig,
                            std::size_t n_fft, double zeta) {
  if (!(zeta >= 1.0)) {
    throw std::invalid_argument("capacity_lower_bound: zeta must be >= 1");
  }
  if (n_fft == 0 || n_sig > n_fft) {
    throw std::invalid_argument("capacity_lower_bound: need 0 < n_fft and n_sig <= n_fft");
  }
  if (!(gamma_out >= 0.0) || !(fs_hz > 0.0)) {
    throw std::invalid_argument("capacity_lower_bound: gamma_out >= 0 and fs > 0 required");
  }
  return static_cast<double>(n_sig) * zeta / static_cast<double>(n_fft) * fs_hz *
         std::log2(1.0 + gamma_out / zeta);
}

}  // namespace aci::bussgang

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/rffe.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace aci::rffe {

namespace {

constexpr std::uint64_t kFrameTag = 0x46524d45;   // frame generation
constexpr std::uint64_t kSourceTag = 0x534f5243;  // thermal floor
constexpr std::uint64_t kStageTag = 0x53544147;   // per-stage noise

// FFTW plans are cached per size; planning is not thread-safe, execution on
// distinct buffers is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) {
      return it->second;
    }
    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(std::make_pair(n, sign), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

cvec dft_unitary(std::span<const std::complex<double>> x, int sign) {
  if (x.empty()) {
    throw std::invalid_argument("dft: input must be non-empty");
  }
  static PlanCache cache;
  fftw_plan plan = cache.get(x.size(), sign);
  cvec in(x.begin(), x.end());
  cvec out(x.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : out) {
    v *= scale;
  }
  return out;
}

void add_cnoise(cvec& u, double power, Rng& rng) {
  if (power <= 0.0) {
    return;
  }
  const double sigma = std::sqrt(power);
  for (auto& v : u) {
    v += sigma * rng.cnormal();
  }
}

}  // namespace

void validate(const StageSpec& stage) {
  if (!std::isfinite(stage.gain_db)) {
    throw std::invalid_argument("StageSpec: gain must be finite");
  }
  if (!(stage.nf_db >= 0.0)) {
    throw std::invalid_argument("StageSpec: noise figure must be >= 0");
  }
  if (stage.iip3_dbm && !std::isfinite(*stage.iip3_dbm)) {
    throw std::invalid_argument("StageSpec: IIP3 must be finite when present");
  }
}

void validate(const RffeChainSpec& chain) {
  if (chain.stages.empty()) {
    throw std::invalid_argument("RffeChainSpec: stage list must be non-empty");
  }
  for (const auto& s : chain.stages) {
    validate(s);
  }
  if (chain.adc_bits < 1 || chain.adc_bits > 16) {
    throw std::invalid_argument("RffeChainSpec: adc_bits must be in [1, 16]");
  }
  if (!(chain.adc_loading_sigma > 0.0)) {
    throw std::invalid_argument("RffeChainSpec: adc_loading_sigma must be > 0");
  }
  if (!(chain.agc_target > 0.0)) {
    throw std::invalid_argument("RffeChainSpec: agc_target must be > 0");
  }
}

RffeChainSpec builtin_chain(Design d) {
  RffeChainSpec chain;
  switch (d) {
    case Design::rx28_d1:
      chain.stages = {{"lna", 14.26, 2.13, -1.456, 8.91}, {"mixer", 0.16, 9.039, -3.1, 4.838}};
      chain.adc_bits = 4;
      chain.adc_loading_sigma = kAdcLoading4Bit;
      break;
    case Design::rx28_d2:
      chain.stages = {{"lna", 12.85, 2.53, 0.603, 5.34}, {"mixer", 3.558, 7.542, 2.1, 7.03}};
      chain.adc_bits = 5;
      chain.adc_loading_sigma = kAdcLoading5Bit;
      break;
    case Design::rx140_d1:
      chain.stages = {{"lna", 16.56, 7.48, -8.90, 15.90}, {"mixer", -1.74, 21.53, -4.45, 5.00}};
      chain.adc_bits = 4;
      chain.adc_loading_sigma = kAdcLoading4Bit;
      break;
    case Design::rx140_d2:
      chain.stages = {{"lna", 11.13, 7.50, -9.15, 4.80}, {"mixer", -0.52, 20.47, -3.88, 5.00}};
      chain.adc_bits = 5;
      chain.adc_loading_sigma = kAdcLoading5Bit;
      break;
  }
  return chain;
}

cvec generate_frame(const FrequencyPlan& plan, const SnrPair& snr, Seed seed) {
  Rng rng = derive_rng(seed, {kFrameTag});
  const double sig_amp = std::sqrt(snr.gamma_sig);
  const double int_amp = std::sqrt(snr.gamma_int);
  cvec x(plan.n_fft());
  for (std::uint32_t n = 0; n < plan.n_fft(); ++n) {
    const double amp = plan.is_signal_bin(n) ? sig_amp : int_amp;
    x[n] = amp * rng.cnormal();
  }
  return x;
}

cvec to_time_domain(std::span<const std::complex<double>> x) {
  return dft_unitary(x, FFTW_BACKWARD);
}

cvec to_freq_domain(std::span<const std::complex<double>> u) {
  return dft_unitary(u, FFTW_FORWARD);
}

double iip3_peak_amplitude(double iip3_dbm, double ref_impedance_ohm) {
  if (!(ref_impedance_ohm > 0.0)) {
    throw std::invalid_argument("iip3_peak_amplitude: impedance must be > 0");
  }
  return std::sqrt(2.0 * dbm_to_watts(iip3_dbm) * ref_impedance_ohm);
}

double cubic_coefficient(double iip3_dbm, double ref_impedance_ohm) {
  const double a = iip3_peak_amplitude(iip3_dbm, ref_impedance_ohm);
  return 4.0 / (3.0 * a * a);
}

double saturation_input_amplitude(double iip3_dbm, double ref_impedance_ohm) {
  // Input level where d/da [a - c3*a^3] vanishes: 1/sqrt(3*c3) = A/2.
  return iip3_peak_amplitude(iip3_dbm, ref_impedance_ohm) / 2.0;
}

cvec apply_nonlinearity(std::span<const std::complex<double>> u, double gain_db,
                        double iip3_dbm, double ref_impedance_ohm) {
  if (!std::isfinite(gain_db) || !std::isfinite(iip3_dbm)) {
    throw std::invalid_argument("apply_nonlinearity: gain and IIP3 must be finite");
  }
  const double g = std::pow(10.0, gain_db / 20.0);
  const double c3 = cubic_coefficient(iip3_dbm, ref_impedance_ohm);
  const double a_sat = saturation_input_amplitude(iip3_dbm, ref_impedance_ohm);
  cvec y(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a == 0.0) {
      y[i] = 0.0;
      continue;
    }
    const double ae = std::min(a, a_sat);
    const double out = g * (ae - c3 * ae * ae * ae);
    y[i] = u[i] * (out / a);
  }
  return y;
}

cvec add_stage_noise(std::span<const std::complex<double>> u, double nf_db,
                     double input_noise_power, Seed seed) {
  if (!(nf_db >= 0.0)) {
    throw std::invalid_argument("add_stage_noise: noise figure must be >= 0");
  }
  if (!(input_noise_power >= 0.0)) {
    throw std::invalid_argument("add_stage_noise: noise power must be >= 0");
  }
  cvec out(u.begin(), u.end());
  const double factor = db_to_linear(nf_db) - 1.0;
  if (factor <= 0.0) {
    return out;
  }
  Rng rng = derive_rng(seed, {kStageTag});
  add_cnoise(out, factor * input_noise_power, rng);
  return out;
}

cvec quantize_with_full_scale(std::span<const std::complex<double>> u, int bits,
                              double full_scale) {
  if (bits < 1) {
    throw std::invalid_argument("quantize: bits must be >= 1");
  }
  cvec out(u.begin(), u.end());
  if (!(full_scale > 0.0)) {
    return out;
  }
  const long levels = 1L << bits;
  const double step = 2.0 * full_scale / static_cast<double>(levels);
  const long top = levels / 2 - 1;
  auto q = [&](double v) {
    long idx = static_cast<long>(std::floor(v / step));
    idx = std::clamp(idx, -levels / 2, top);
    return (static_cast<double>(idx) + 0.5) * step;
  };
  for (auto& v : out) {
    v = {q(v.real()), q(v.imag())};
  }
  return out;
}

cvec quantize(std::span<const std::complex<double>> u, int bits, double loading_sigma) {
  if (bits < 1) {
    throw std::invalid_argument("quantize: bits must be >= 1");
  }
  if (!(loading_sigma > 0.0)) {
    throw std::invalid_argument("quantize: loading_sigma must be > 0");
  }
  double sum_sq = 0.0;
  for (const auto& v : u) {
    sum_sq += v.real() * v.real() + v.imag() * v.imag();
  }
  if (sum_sq == 0.0 || u.empty()) {
    return cvec(u.begin(), u.end());
  }
  const double rms = std::sqrt(sum_sq / (2.0 * static_cast<double>(u.size())));
  return quantize_with_full_scale(u, bits, loading_sigma * rms);
}

std::vector<FrameBatch> simulate_chain(const FrequencyPlan& plan, const RffeChainSpec& chain,
                                       const SnrPair& snr, std::size_t n_frames, Seed seed) {
  validate(chain);
  if (n_frames == 0) {
    throw std::invalid_argument("simulate_chain: n_frames must be >= 1");
  }

  constexpr double kRefImpedance = 50.0;
  // Reference thermal floor per complex sample, in envelope volt^2 units.
  const double thermal_v2 =
      2.0 * kRefImpedance * kThermalNoiseDensity * plan.sample_rate_hz();
  const double volt_scale = std::sqrt(thermal_v2);

  std::vector<FrameBatch> batches;
  batches.reserve(n_frames);
  std::vector<cvec> analog(n_frames);
  std::vector<double> frame_power(n_frames);

  for (std::size_t f = 0; f < n_frames; ++f) {
    cvec x = generate_frame(plan, snr, Seed{derive_state(seed, {kFrameTag, f})});
    cvec u = to_time_domain(x);
    for (auto& v : u) {
      v *= volt_scale;
    }
    // Antenna-referred thermal floor; stage noise figures add their excess on
    // top of it.
    {
      Rng rng = derive_rng(seed, {kSourceTag, f});
      add_cnoise(u, thermal_v2, rng);
    }
    for (std::size_t k = 0; k < chain.stages.size(); ++k) {
      const StageSpec& st = chain.stages[k];
      if (st.iip3_dbm) {
        u = apply_nonlinearity(u, st.gain_db, *st.iip3_dbm, kRefImpedance);
      } else {
        const double g = std::pow(10.0, st.gain_db / 20.0);
        for (auto& v : u) {
          v *= g;
        }
      }
      const double stage_gain = db_to_linear(st.gain_db);
      u = add_stage_noise(u, st.nf_db, thermal_v2 * stage_gain,
                          Seed{derive_state(seed, {kStageTag, f, k})});
    }
    double p = 0.0;
    for (const auto& v : u) {
      p += v.real() * v.real() + v.imag() * v.imag();
    }
    frame_power[f] = p;
    analog[f] = std::move(u);
    batches.push_back(FrameBatch{std::move(x), {}, plan});
  }

  // Batch AGC: one scale for the whole batch, then one quantizer full scale
  // derived from the scaled batch RMS.
  double total_power = 0.0;
  for (double p : frame_power) {
    total_power += p;
  }
  const double n_samples = static_cast<double>(n_frames) * static_cast<double>(plan.n_fft());
  const double mean_power = total_power / n_samples;
  const double agc_gain = mean_power > 0.0 ? std::sqrt(chain.agc_target / mean_power) : 1.0;
  const double component_rms = std::sqrt(mean_power / 2.0) * agc_gain;
  const double full_scale = chain.adc_loading_sigma * component_rms;

  for (std::size_t f = 0; f < n_frames; ++f) {
    cvec& u = analog[f];
    for (auto& v : u) {
      v *= agc_gain;
    }
    cvec q = quantize_with_full_scale(u, chain.adc_bits, full_scale);
    batches[f].rx_freq = to_freq_domain(q);
  }
  return batches;
}

double cascade_noise_figure(std::span<const StageSpec> stages) {
  if (stages.empty()) {
    throw std::invalid_argument("cascade_noise_figure: stage list must be non-empty");
  }
  double total_f = 0.0;
  double gain_before = 1.0;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    validate(stages[k]);
    const double f = db_to_linear(stages[k].nf_db);
    total_f += (k == 0 ? f : (f - 1.0) / gain_before);
    gain_before *= db_to_linear(stages[k].gain_db);
  }
  return linear_to_db(total_f);
}

double cascade_iip3_dbm(std::span<const StageSpec> stages) {
  if (stages.empty()) {
    throw std::invalid_argument("cascade_iip3_dbm: stage list must be non-empty");
  }
  double inv_p = 0.0;
  double gain_before = 1.0;
  for (const auto& st : stages) {
    validate(st);
    if (!st.iip3_dbm) {
      throw std::invalid_argument("cascade_iip3_dbm: stage '" + st.name + "' has no IIP3");
    }
    inv_p += gain_before / dbm_to_watts(*st.iip3_dbm);
    gain_before *= db_to_linear(st.gain_db);
  }
  return watts_to_dbm(1.0 / inv_p);
}

}  // namespace aci::rffe

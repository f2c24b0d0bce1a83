// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "aci/rffe.hpp"

namespace aci::cli {

namespace {

constexpr std::uint64_t kLinkTag = 0x4c494e4b;
constexpr std::uint64_t kNetTag = 0x4e4554;

// Zero linear ratios show up as this floor in the *_db output columns so
// every emitted number stays finite.
constexpr double kDbFloor = -400.0;

double db_or_floor(double linear) { return linear > 0.0 ? linear_to_db(linear) : kDbFloor; }

double grid_db_to_linear(double db) {
  return std::isinf(db) && db < 0.0 ? 0.0 : db_to_linear(db);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path.string());
  }
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_number(row[i]);
    }
    out << "\n";
  }
  if (!out.flush()) {
    throw std::runtime_error("failed writing output file " + path.string());
  }
}

void write_cdf(const std::filesystem::path& dir, const std::string& name,
               const netsim::CdfTable& table) {
  std::vector<std::vector<double>> rows;
  rows.reserve(table.value_db.size());
  for (std::size_t i = 0; i < table.value_db.size(); ++i) {
    rows.push_back({table.value_db[i], table.cdf[i]});
  }
  write_table(dir / name, "snr_db,cdf", rows);
}

}  // namespace

unsigned worker_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("SIM_THREADS");
  if (env == nullptr || *env == '\0') {
    return hw;
  }
  char* end = nullptr;
  const unsigned long requested = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || requested == 0) {
    return hw;
  }
  return static_cast<unsigned>(std::min<unsigned long>(requested, hw));
}

RunResult run_link_fit(const ExperimentConfig& cfg, LinkFitOutcome* outcome) {
  using bussgang::SnrMeasurement;
  try {
    rffe::validate(cfg.chain);
  } catch (const std::invalid_argument& ex) {
    return {RunStatus::config_error, std::string("invalid chain: ") + ex.what()};
  }

  const FrequencyPlan plan =
      FrequencyPlan::contiguous_halves(cfg.grid.n_fft, cfg.grid.sample_rate_hz);
  const std::size_t n_sig = cfg.grid.gamma_sig_db.size();
  const std::size_t n_int = cfg.grid.gamma_int_db.size();
  const std::size_t n_points = n_sig * n_int;

  std::vector<SnrMeasurement> measurements(n_points);
  try {
    parallel_for(n_points, worker_count(), [&](std::size_t i) {
      const double gs = grid_db_to_linear(cfg.grid.gamma_sig_db[i / n_int]);
      const double gi = grid_db_to_linear(cfg.grid.gamma_int_db[i % n_int]);
      const SnrPair snr(gs, gi);
      const auto batches =
          rffe::simulate_chain(plan, cfg.chain, snr, cfg.grid.frames_per_point,
                               Seed{derive_state(cfg.seed, {kLinkTag, i})});
      std::vector<std::pair<std::complex<double>, std::complex<double>>> pairs;
      pairs.reserve(batches.size() * plan.n_sig());
      for (const auto& b : batches) {
        for (std::uint32_t bin : plan.sig_bins()) {
          pairs.emplace_back(b.tx_freq[bin], b.rx_freq[bin]);
        }
      }
      const auto est = bussgang::estimate_bussgang(pairs);
      measurements[i] = SnrMeasurement{gs, gi, bussgang::output_snr(est, gs)};
    });
  } catch (const std::exception& ex) {
    return {RunStatus::config_error, std::string("link simulation failed: ") + ex.what()};
  }

  bussgang::FitReport report;
  try {
    const double noise_factor = db_to_linear(rffe::cascade_noise_figure(cfg.chain.stages));
    const SaturationModel init = bussgang::init_from_measurements(measurements, noise_factor);
    report = bussgang::fit_model(measurements, init);
  } catch (const bussgang::identifiability_error& ex) {
    return {RunStatus::identifiability, ex.what()};
  } catch (const std::exception& ex) {
    return {RunStatus::config_error, std::string("fit failed: ") + ex.what()};
  }

  try {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::vector<std::vector<double>> rows;
    rows.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      const SnrMeasurement& m = measurements[i];
      const double predicted =
          bussgang::model_predict(report.model, SnrPair(m.gamma_sig, m.gamma_int));
      rows.push_back({db_or_floor(m.gamma_sig), db_or_floor(m.gamma_int),
                      db_or_floor(m.gamma_out), db_or_floor(predicted)});
    }
    write_table(dir / "measurements.csv",
                "gamma_sig_db,gamma_int_db,gamma_out_db,gamma_out_model_db", rows);
    write_table(dir / "fit_summary.csv",
                "beta,alpha1,alpha2,residual_norm,iterations,converged,chain_nf_db",
                {{report.model.beta, report.model.alpha1, report.model.alpha2,
                  report.residual_norm, static_cast<double>(report.iterations),
                  report.converged ? 1.0 : 0.0,
                  rffe::cascade_noise_figure(cfg.chain.stages)}});
  } catch (const std::exception& ex) {
    return {RunStatus::config_error, std::string("output failed: ") + ex.what()};
  }

  if (outcome != nullptr) {
    outcome->report = report;
    outcome->measurements = std::move(measurements);
  }
  if (!report.converged) {
    return {RunStatus::non_convergence, "fit did not converge"};
  }
  return {};
}

RunResult run_network(const ExperimentConfig& cfg, NetworkOutcome* outcome) {
  netsim::NetworkScenario scn = cfg.scenario;
  if (cfg.custom_model) {
    scn.model = *cfg.custom_model;
  } else if (cfg.design) {
    scn.model = netsim::builtin_model(*cfg.design);
  } else {
    return {RunStatus::config_error, "custom design needs a [model] section"};
  }

  netsim::DropsResult drops;
  try {
    drops = netsim::run_drops(scn, cfg.n_drops,
                              Seed{derive_state(cfg.seed, {kNetTag})}, worker_count());
  } catch (const netsim::empty_result_error& ex) {
    return {RunStatus::empty_result, ex.what()};
  } catch (const std::exception& ex) {
    return {RunStatus::config_error, std::string("network simulation failed: ") + ex.what()};
  }

  try {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    std::vector<double> full, no_aci, no_dist;
    std::vector<std::vector<double>> rows;
    rows.reserve(drops.reports.size());
    for (const auto& r : drops.reports) {
      full.push_back(r.sinr_full);
      no_aci.push_back(r.sinr_no_aci);
      no_dist.push_back(r.sinr_no_distortion);
      rows.push_back({static_cast<double>(r.drop_index), static_cast<double>(r.ue_index),
                      static_cast<double>(r.serving_gnb), static_cast<double>(r.serving_sector),
                      db_or_floor(r.sinr_full), db_or_floor(r.sinr_no_aci),
                      db_or_floor(r.sinr_no_distortion)});
    }
    write_table(dir / "ue_reports.csv",
                "drop,ue,serving_gnb,serving_sector,sinr_full_db,sinr_no_aci_db,"
                "sinr_no_distortion_db",
                rows);
    write_cdf(dir, "cdf_full.csv", netsim::empirical_cdf(full));
    write_cdf(dir, "cdf_no_aci.csv", netsim::empirical_cdf(no_aci));
    write_cdf(dir, "cdf_no_distortion.csv", netsim::empirical_cdf(no_dist));
  } catch (const std::exception& ex) {
    return {RunStatus::config_error, std::string("output failed: ") + ex.what()};
  }

  if (outcome != nullptr) {
    outcome->reports = std::move(drops.reports);
  }
  return {};
}

void list_designs(std::ostream& os) {
  for (Design d : kAllDesigns) {
    const rffe::RffeChainSpec chain = rffe::builtin_chain(d);
    const SaturationModel model = netsim::builtin_model(d);
    const netsim::NetworkScenario scn = netsim::default_scenario(d);
    os << design_name(d) << "  (" << scn.fc_ghz << " GHz)\n";
    for (const auto& st : chain.stages) {
      os << "  " << st.name << ": gain " << st.gain_db << " dB, nf " << st.nf_db << " dB";
      if (st.iip3_dbm) {
        os << ", iip3 " << *st.iip3_dbm << " dBm";
      }
      os << "\n";
    }
    os << "  adc: " << chain.adc_bits << " bits, loading " << chain.adc_loading_sigma
       << " sigma\n";
    os << "  cascade nf: " << format_number(rffe::cascade_noise_figure(chain.stages))
       << " dB, cascade iip3: " << format_number(rffe::cascade_iip3_dbm(chain.stages))
       << " dBm\n";
    os << "  model: beta " << model.beta << ", alpha1 " << model.alpha1 << ", alpha2 "
       << model.alpha2 << "\n";
    os << "  arrays: gnb " << scn.gnb_array.rows << "x" << scn.gnb_array.cols << ", ue "
       << scn.ue_array.rows << "x" << scn.ue_array.cols << "\n";
  }
}

}  // namespace aci::cli

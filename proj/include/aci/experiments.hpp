// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "aci/bussgang.hpp"
#include "aci/config.hpp"
#include "aci/netsim.hpp"

namespace aci::cli {

enum class RunStatus : int {
  ok = 0,
  config_error = 1,
  non_convergence = 2,
  identifiability = 3,
  empty_result = 4,
};

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::string message;
};

struct LinkFitOutcome {
  bussgang::FitReport report;
  std::vector<bussgang::SnrMeasurement> measurements;
};

struct NetworkOutcome {
  std::vector<netsim::UeReport> reports;
};

// Worker count: SIM_THREADS caps it, 0 or unset means one per hardware
// thread.
unsigned worker_count();

// Sweeps the grid through the chain, estimates the output SNR per point,
// fits the saturation model and writes measurements.csv + fit_summary.csv
// under cfg.out_dir.
RunResult run_link_fit(const ExperimentConfig& cfg, LinkFitOutcome* outcome = nullptr);

// Runs the drops and writes cdf_full.csv, cdf_no_aci.csv,
// cdf_no_distortion.csv and ue_reports.csv under cfg.out_dir.
RunResult run_network(const ExperimentConfig& cfg, NetworkOutcome* outcome = nullptr);

void list_designs(std::ostream& os);

}  // namespace aci::cli

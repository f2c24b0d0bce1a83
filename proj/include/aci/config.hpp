// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aci/core.hpp"
#include "aci/netsim.hpp"
#include "aci/rffe.hpp"

namespace aci::cli {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Measurement grid for the link-layer experiment. dB entries may be -inf
// (zero linear interference).
struct GridSpec {
  std::vector<double> gamma_sig_db;
  std::vector<double> gamma_int_db;
  std::size_t frames_per_point = 64;
  std::size_t n_fft = 1024;
  double sample_rate_hz = 491.52e6;
};

GridSpec default_grid(Design d);

enum class Mode { link_fit, network };

struct ExperimentConfig {
  Mode mode = Mode::link_fit;                   // set from the CLI subcommand
  std::optional<Design> design = Design::rx28_d1;  // nullopt = custom
  netsim::NetworkScenario scenario;
  GridSpec grid;
  rffe::RffeChainSpec chain;
  std::optional<SaturationModel> custom_model;  // overrides the built-in table
  std::size_t n_drops = 100;
  Seed seed{1};
  std::string out_dir = ".";
};

// Config with every field at its documented default for the given design.
ExperimentConfig default_config(std::optional<Design> design);

// Flat `key = value` lines grouped by `[section]` headers; `#` starts a
// comment. Unknown keys are collected and reported together; type mismatches
// name the line and key. Missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);

}  // namespace aci::cli

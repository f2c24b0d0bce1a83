// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include "aci/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace aci::cli {

namespace {

struct Entry {
  int line = 0;
  std::string section;
  std::string key;
  std::string value;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw config_error("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const Entry& e, bool allow_inf = false) {
  const std::string token(trim(e.value));
  if (allow_inf) {
    if (token == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
    if (token == "inf") {
      return std::numeric_limits<double>::infinity();
    }
  }
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v)) {
    fail(e.line, "key '" + e.key + "': expected a number, got '" + token + "'");
  }
  return v;
}

long long parse_int(const Entry& e) {
  const std::string token(trim(e.value));
  char* end = nullptr;
  const long long v = std::strtoll(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size()) {
    fail(e.line, "key '" + e.key + "': expected an integer, got '" + token + "'");
  }
  return v;
}

std::uint64_t parse_u64(const Entry& e) {
  const std::string token(trim(e.value));
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size() || token.front() == '-') {
    fail(e.line, "key '" + e.key + "': expected a non-negative integer, got '" + token + "'");
  }
  return v;
}

bool parse_bool(const Entry& e) {
  const std::string token(trim(e.value));
  if (token == "true" || token == "1" || token == "yes") {
    return true;
  }
  if (token == "false" || token == "0" || token == "no") {
    return false;
  }
  fail(e.line, "key '" + e.key + "': expected a boolean, got '" + token + "'");
}

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!current.empty()) {
        out.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    out.push_back(std::move(current));
  }
  return out;
}

std::vector<double> parse_double_list(const Entry& e, bool allow_neg_inf) {
  std::vector<double> out;
  for (const std::string& token : split_tokens(e.value)) {
    if (allow_neg_inf && token == "-inf") {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      fail(e.line, "key '" + e.key + "': expected a number list, got '" + token + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    fail(e.line, "key '" + e.key + "': empty list");
  }
  return out;
}

rffe::StageSpec parse_stage(const Entry& e) {
  const std::vector<std::string> tokens = split_tokens(e.value);
  if (tokens.size() < 4 || tokens.size() > 5) {
    fail(e.line,
         "key 'stage': expected 'name gain_db nf_db iip3_dbm|none [power_mw]', got '" +
             std::string(trim(e.value)) + "'");
  }
  auto number = [&](const std::string& token, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      fail(e.line, std::string("key 'stage': expected a number for ") + what + ", got '" +
                       token + "'");
    }
    return v;
  };
  rffe::StageSpec stage;
  stage.name = tokens[0];
  stage.gain_db = number(tokens[1], "gain_db");
  stage.nf_db = number(tokens[2], "nf_db");
  if (tokens[3] != "none") {
    stage.iip3_dbm = number(tokens[3], "iip3_dbm");
  }
  if (tokens.size() == 5) {
    stage.power_mw = number(tokens[4], "power_mw");
  }
  return stage;
}

int rx_antennas(Design d) {
  return (d == Design::rx28_d1 || d == Design::rx28_d2) ? 16 : 64;
}

}  // namespace

GridSpec default_grid(Design d) {
  GridSpec grid;
  for (int db = -10; db <= 60; db += 5) {
    grid.gamma_sig_db.push_back(static_cast<double>(db));
  }
  grid.gamma_int_db = {-std::numeric_limits<double>::infinity(), 10.0, 30.0, 50.0};
  if (d == Design::rx140_d1 || d == Design::rx140_d2) {
    grid.sample_rate_hz = 1966.08e6;
  }
  return grid;
}

ExperimentConfig default_config(std::optional<Design> design) {
  ExperimentConfig cfg;
  cfg.design = design;
  const Design base = design.value_or(Design::rx28_d1);
  cfg.scenario = netsim::default_scenario(base);
  cfg.grid = default_grid(base);
  if (design) {
    cfg.chain = rffe::builtin_chain(base);
  } else {
    cfg.chain.stages.clear();  // custom runs must provide their own stages
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        fail(line_no, "malformed section header '" + std::string(line) + "'");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    }
    Entry e;
    e.line = line_no;
    e.section = section;
    e.key = std::string(trim(line.substr(0, eq)));
    e.value = std::string(trim(line.substr(eq + 1)));
    if (e.key.empty()) {
      fail(line_no, "empty key");
    }
    entries.push_back(std::move(e));
  }

  // The design choice fixes the defaults everything else overrides.
  std::optional<Design> design = Design::rx28_d1;
  for (const Entry& e : entries) {
    if (e.section.empty() && e.key == "design") {
      const std::string value(trim(e.value));
      if (value == "custom") {
        design = std::nullopt;
      } else if (auto d = parse_design(value)) {
        design = *d;
      } else {
        fail(e.line, "unknown design '" + value + "'");
      }
    }
  }

  ExperimentConfig cfg = default_config(design);
  bool stages_replaced = false;
  std::vector<std::string> unknown;
  double model_beta = 1.0, model_alpha1 = 0.0, model_alpha2 = 0.0;
  bool model_seen = false;

  for (const Entry& e : entries) {
    auto& scn = cfg.scenario;
    if (e.section.empty()) {
      if (e.key == "design") {
        continue;  // already applied
      } else if (e.key == "seed") {
        cfg.seed = Seed{parse_u64(e)};
      } else if (e.key == "n_drops") {
        cfg.n_drops = static_cast<std::size_t>(parse_u64(e));
      } else if (e.key == "out_dir") {
        cfg.out_dir = std::string(trim(e.value));
      } else {
        unknown.push_back("line " + std::to_string(e.line) + ": '" + e.key + "'");
      }
    } else if (e.section == "scenario") {
      if (e.key == "area_m") scn.area_m = parse_double(e);
      else if (e.key == "isd_m") scn.isd_m = parse_double(e);
      else if (e.key == "min_dist_m") scn.min_dist_m = parse_double(e);
      else if (e.key == "fc_ghz") scn.fc_ghz = parse_double(e);
      else if (e.key == "bw_hz") scn.bw_hz = parse_double(e);
      else if (e.key == "tx_power_dbm") scn.tx_power_dbm = parse_double(e);
      else if (e.key == "gnb_height_min_m") scn.gnb_height_min_m = parse_double(e);
      else if (e.key == "gnb_height_max_m") scn.gnb_height_max_m = parse_double(e);
      else if (e.key == "ue_height_m") scn.ue_height_m = parse_double(e);
      else if (e.key == "downtilt_deg") scn.downtilt_deg = parse_double(e);
      else if (e.key == "n_sectors") scn.n_sectors = static_cast<int>(parse_int(e));
      else if (e.key == "hpbw_deg") scn.hpbw_deg = parse_double(e);
      else if (e.key == "gnb_rows") scn.gnb_array.rows = static_cast<int>(parse_int(e));
      else if (e.key == "gnb_cols") scn.gnb_array.cols = static_cast<int>(parse_int(e));
      else if (e.key == "ue_rows") scn.ue_array.rows = static_cast<int>(parse_int(e));
      else if (e.key == "ue_cols") scn.ue_array.cols = static_cast<int>(parse_int(e));
      else if (e.key == "ue_fill_cap_factor") scn.ue_fill_cap_factor = parse_double(e);
      else if (e.key == "linear_cochannel_interference")
        scn.linear_cochannel_interference = parse_bool(e);
      else unknown.push_back("line " + std::to_string(e.line) + ": 'scenario." + e.key + "'");
    } else if (e.section == "grid") {
      if (e.key == "gamma_sig_db") cfg.grid.gamma_sig_db = parse_double_list(e, false);
      else if (e.key == "gamma_int_db") cfg.grid.gamma_int_db = parse_double_list(e, true);
      else if (e.key == "frames_per_point")
        cfg.grid.frames_per_point = static_cast<std::size_t>(parse_u64(e));
      else if (e.key == "n_fft") cfg.grid.n_fft = static_cast<std::size_t>(parse_u64(e));
      else if (e.key == "sample_rate_hz") cfg.grid.sample_rate_hz = parse_double(e);
      else unknown.push_back("line " + std::to_string(e.line) + ": 'grid." + e.key + "'");
    } else if (e.section == "chain") {
      if (e.key == "stage") {
        if (!stages_replaced) {
          cfg.chain.stages.clear();
          stages_replaced = true;
        }
        cfg.chain.stages.push_back(parse_stage(e));
      } else if (e.key == "adc_bits") {
        cfg.chain.adc_bits = static_cast<int>(parse_int(e));
      } else if (e.key == "adc_loading_sigma") {
        cfg.chain.adc_loading_sigma = parse_double(e);
      } else if (e.key == "agc_target") {
        cfg.chain.agc_target = parse_double(e);
      } else {
        unknown.push_back("line " + std::to_string(e.line) + ": 'chain." + e.key + "'");
      }
    } else if (e.section == "model") {
      model_seen = true;
      if (e.key == "beta") model_beta = parse_double(e);
      else if (e.key == "alpha1") model_alpha1 = parse_double(e);
      else if (e.key == "alpha2") model_alpha2 = parse_double(e);
      else unknown.push_back("line " + std::to_string(e.line) + ": 'model." + e.key + "'");
    } else {
      unknown.push_back("line " + std::to_string(e.line) + ": '" + e.section + "." + e.key + "'");
    }
  }

  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) {
      msg += "\n  " + k;
    }
    throw config_error(msg);
  }

  if (model_seen) {
    try {
      cfg.custom_model = SaturationModel(model_beta, model_alpha1, model_alpha2);
    } catch (const std::invalid_argument& ex) {
      throw config_error(std::string("invalid [model] parameters: ") + ex.what());
    }
  }

  try {
    netsim::validate(cfg.scenario);
  } catch (const std::invalid_argument& ex) {
    throw config_error(std::string("invalid scenario: ") + ex.what());
  }
  if (cfg.grid.n_fft < 2 || (cfg.grid.n_fft % 2) != 0) {
    throw config_error("grid.n_fft must be an even value >= 2");
  }
  if (cfg.grid.frames_per_point < 1) {
    throw config_error("grid.frames_per_point must be >= 1");
  }
  if (!(cfg.grid.sample_rate_hz > 0.0)) {
    throw config_error("grid.sample_rate_hz must be positive");
  }
  for (double g : cfg.grid.gamma_sig_db) {
    if (!std::isfinite(g)) {
      throw config_error("grid.gamma_sig_db entries must be finite");
    }
  }
  if (cfg.design) {
    // The fitted models assume the table's RX antenna counts.
    const int expected = rx_antennas(*cfg.design);
    if (cfg.scenario.ue_array.elements() != expected) {
      throw config_error("design " + std::string(design_name(*cfg.design)) + " expects " +
                         std::to_string(expected) + " UE antennas, got " +
                         std::to_string(cfg.scenario.ue_array.elements()));
    }
  }
  return cfg;
}

}  // namespace aci::cli

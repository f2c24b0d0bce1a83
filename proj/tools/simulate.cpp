// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 acisim contributors

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "aci/config.hpp"
#include "aci/experiments.hpp"

namespace {

int load_config(const std::string& path, aci::cli::ExperimentConfig& cfg) {
  if (path.empty()) {
    cfg = aci::cli::default_config(aci::Design::rx28_d1);
    return 0;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file '" << path << "'\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    cfg = aci::cli::parse_config(buffer.str());
  } catch (const aci::cli::config_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

int finish(const aci::cli::RunResult& result) {
  if (!result.message.empty()) {
    std::cerr << "error: " << result.message << "\n";
  }
  return static_cast<int>(result.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave receiver nonlinearity and adjacent-carrier interference simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file");
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--out", out_override, "output directory");
  };

  CLI::App* link = app.add_subcommand("link-fit", "sweep the chain and fit the SNR model");
  add_common(link);
  CLI::App* network = app.add_subcommand("network", "two-carrier network SNR distributions");
  add_common(network);
  CLI::App* list = app.add_subcommand("list-designs", "show the built-in receiver designs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (list->parsed()) {
    aci::cli::list_designs(std::cout);
    return 0;
  }

  aci::cli::ExperimentConfig cfg;
  if (int rc = load_config(config_path, cfg); rc != 0) {
    return rc;
  }
  if (seed_override) {
    cfg.seed = aci::Seed{*seed_override};
  }
  if (out_override) {
    cfg.out_dir = *out_override;
  }

  if (link->parsed()) {
    cfg.mode = aci::cli::Mode::link_fit;
    return finish(aci::cli::run_link_fit(cfg));
  }
  cfg.mode = aci::cli::Mode::network;
  return finish(aci::cli::run_network(cfg));
}

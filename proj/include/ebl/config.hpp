#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ebl/econometrics.hpp"
#include "ebl/equilibrium.hpp"
#include "ebl/simulation.hpp"
#include "ebl/verify.hpp"

namespace ebl {

struct ScenarioConfig {
  std::string name;
  ShockScenario scenario;
};

struct PanelConfig {
  std::int64_t periods = 60;
  std::uint64_t seed = 0;
  bool seed_set = false;  // falls back to the run seed
  double global_factor_share = 0.0;
  CodDefinition cod = CodDefinition::net_reallocation;
  std::vector<SyntheticCountry> countries;  // empty: the default 2x2 design
};

struct RunConfig {
  ModelParams model;
  std::int64_t periods = 102;
  std::uint64_t seed = 42;
  double global_factor_share = 0.0;
  VerifyOptions verify;
  std::vector<ScenarioConfig> scenarios;
  PanelConfig panel;
  std::string output_dir = "out";
  bool svg = false;

  // Applies a seed to every seeded component that did not pin its own.
  void set_seed(std::uint64_t seed);
  std::vector<SyntheticCountry> panel_countries() const;
};

// Parses and validates the JSON configuration. Errors are ErrorCode::parameter
// with a message naming the offending field (e.g. "model.tau").
RunConfig parse_config(const std::string& json_text);

// Canonical JSON of the effective configuration.
std::string config_to_json(const RunConfig& config);

}  // namespace ebl

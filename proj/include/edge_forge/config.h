#pragma once

// One JSON document configures a whole experiment, with sections `world`,
// `rss`, `sut`, `neural`, `agent` and `validation`. Every section is
// optional; keys inside a section are checked strictly, and an unknown key
// is a ConfigError naming it.

#include <string>
#include <string_view>
#include <vector>

#include "edge_forge/agent.h"
#include "edge_forge/neural.h"
#include "edge_forge/rss.h"
#include "edge_forge/sim_env.h"
#include "edge_forge/validation.h"
#include "json.hpp"

namespace edge_forge {

struct NeuralConfig {
  std::vector<int> layer_dims = kDefaultLayerDims;
  AdamConfig adam;
};

struct ExperimentConfig {
  WorldConfig world;
  RssParams rss;
  CasParams sut;
  NeuralConfig neural;
  TrainConfig agent;
  ValidationConfig validation;
};

// Validates every section.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

// Accepts either a config document or a run manifest (its "config" member
// is used). Throws ConfigError on unknown keys, wrong types or invalid
// values.
ExperimentConfig config_from_json(const nlohmann::json& doc);

// Throws ConfigError if the file is missing or unparsable; the message names
// the path.
ExperimentConfig load_config(const std::string& path);

// Applies "section.key=value" with the value parsed as JSON (bare words fall
// back to strings), then re-validates.
void apply_override(ExperimentConfig& config, std::string_view assignment);

}  // namespace edge_forge

#include "edge_forge/config.h"

#include <fstream>
#include <set>

#include "edge_forge/errors.h"

namespace edge_forge {

namespace {

using nlohmann::json;

void check_keys(const json& section, const std::string& name,
                const std::set<std::string>& allowed) {
  if (!section.is_object()) {
    throw ConfigError("config section '" + name + "' must be an object");
  }
  for (const auto& [key, value] : section.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown config key '" + name + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& section, const std::string& name, const char* key,
          T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + name + "." + key +
                      "' has the wrong type");
  }
}

json world_json(const WorldConfig& w) {
  return {{"dt", w.dt},
          {"ego_start_x", w.ego_start_x},
          {"ego_target_speed", w.ego_target_speed},
          {"ego_speed_noise_sigma", w.ego_speed_noise_sigma},
          {"crosswalk_x", w.crosswalk_x},
          {"lane_half_width", w.lane_half_width},
          {"ped_start_offsets", w.ped_start_offsets},
          {"detection_range", w.detection_range},
          {"roi_lateral_halfwidth", w.roi_lateral_halfwidth},
          {"collision_radius", w.collision_radius},
          {"max_travel", w.max_travel},
          {"max_sim_time", w.max_sim_time},
          {"seed", w.seed}};
}

void read_world(const json& s, WorldConfig& w) {
  const std::string name = "world";
  check_keys(s, name,
             {"dt", "ego_start_x", "ego_target_speed", "ego_speed_noise_sigma",
              "crosswalk_x", "lane_half_width", "ped_start_offsets",
              "detection_range", "roi_lateral_halfwidth", "collision_radius",
              "max_travel", "max_sim_time", "seed"});
  read(s, name, "dt", w.dt);
  read(s, name, "ego_start_x", w.ego_start_x);
  read(s, name, "ego_target_speed", w.ego_target_speed);
  read(s, name, "ego_speed_noise_sigma", w.ego_speed_noise_sigma);
  read(s, name, "crosswalk_x", w.crosswalk_x);
  read(s, name, "lane_half_width", w.lane_half_width);
  if (s.contains("ped_start_offsets")) {
    std::vector<double> offsets;
    read(s, name, "ped_start_offsets", offsets);
    if (offsets.size() != 2) {
      throw ConfigError(
          "config key 'world.ped_start_offsets' needs exactly 2 entries");
    }
    w.ped_start_offsets = {offsets[0], offsets[1]};
  }
  read(s, name, "detection_range", w.detection_range);
  read(s, name, "roi_lateral_halfwidth", w.roi_lateral_halfwidth);
  read(s, name, "collision_radius", w.collision_radius);
  read(s, name, "max_travel", w.max_travel);
  read(s, name, "max_sim_time", w.max_sim_time);
  read(s, name, "seed", w.seed);
}

json rss_json(const RssParams& p) {
  return {{"rho", p.rho},
          {"a_max_accel", p.a_max_accel},
          {"a_min_brake", p.a_min_brake},
          {"a_max_brake", p.a_max_brake}};
}

void read_rss(const json& s, RssParams& p) {
  const std::string name = "rss";
  check_keys(s, name, {"rho", "a_max_accel", "a_min_brake", "a_max_brake"});
  read(s, name, "rho", p.rho);
  read(s, name, "a_max_accel", p.a_max_accel);
  read(s, name, "a_min_brake", p.a_min_brake);
  read(s, name, "a_max_brake", p.a_max_brake);
}

json sut_json(const CasParams& p) {
  return {{"brake_decel", p.brake_decel},
          {"max_accel", p.max_accel},
          {"gain", p.gain}};
}

void read_sut(const json& s, CasParams& p) {
  const std::string name = "sut";
  check_keys(s, name, {"brake_decel", "max_accel", "gain"});
  read(s, name, "brake_decel", p.brake_decel);
  read(s, name, "max_accel", p.max_accel);
  read(s, name, "gain", p.gain);
}

json neural_json(const NeuralConfig& n) {
  return {{"layer_dims", n.layer_dims},
          {"lr", n.adam.lr},
          {"beta1", n.adam.beta1},
          {"beta2", n.adam.beta2},
          {"eps_hat", n.adam.eps_hat}};
}

void read_neural(const json& s, NeuralConfig& n) {
  const std::string name = "neural";
  check_keys(s, name, {"layer_dims", "lr", "beta1", "beta2", "eps_hat"});
  read(s, name, "layer_dims", n.layer_dims);
  read(s, name, "lr", n.adam.lr);
  read(s, name, "beta1", n.adam.beta1);
  read(s, name, "beta2", n.adam.beta2);
  read(s, name, "eps_hat", n.adam.eps_hat);
}

json agent_json(const TrainConfig& a) {
  return {{"gamma", a.gamma},
          {"alpha", a.alpha},
          {"batch_size", a.batch_size},
          {"replay_capacity", a.replay_capacity},
          {"target_sync_every", a.target_sync_every},
          {"eps_start", a.eps_start},
          {"eps_decay", a.eps_decay},
          {"eps_min", a.eps_min},
          {"max_episodes", a.max_episodes},
          {"checkpoint_every", a.checkpoint_every},
          {"seed", a.seed}};
}

void read_agent(const json& s, TrainConfig& a) {
  const std::string name = "agent";
  check_keys(s, name,
             {"gamma", "alpha", "batch_size", "replay_capacity",
              "target_sync_every", "eps_start", "eps_decay", "eps_min",
              "max_episodes", "checkpoint_every", "seed"});
  read(s, name, "gamma", a.gamma);
  read(s, name, "alpha", a.alpha);
  read(s, name, "batch_size", a.batch_size);
  read(s, name, "replay_capacity", a.replay_capacity);
  read(s, name, "target_sync_every", a.target_sync_every);
  read(s, name, "eps_start", a.eps_start);
  read(s, name, "eps_decay", a.eps_decay);
  read(s, name, "eps_min", a.eps_min);
  read(s, name, "max_episodes", a.max_episodes);
  read(s, name, "checkpoint_every", a.checkpoint_every);
  read(s, name, "seed", a.seed);
}

json validation_json(const ValidationConfig& v) {
  return {{"success_threshold", v.success_threshold},
          {"fraction_basis", to_string(v.fraction_basis)},
          {"reward_window", v.reward_window},
          {"top_k", v.top_k}};
}

void read_validation(const json& s, ValidationConfig& v) {
  const std::string name = "validation";
  check_keys(s, name,
             {"success_threshold", "fraction_basis", "reward_window", "top_k"});
  read(s, name, "success_threshold", v.success_threshold);
  if (s.contains("fraction_basis")) {
    std::string basis;
    read(s, name, "fraction_basis", basis);
    v.fraction_basis = fraction_basis_from_string(basis);
  }
  read(s, name, "reward_window", v.reward_window);
  read(s, name, "top_k", v.top_k);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  validate(c.world);
  validate(c.rss);
  validate(c.sut);
  const auto& dims = c.neural.layer_dims;
  if (dims.size() != 4 || dims.front() != 2 || dims.back() != kNumActions) {
    throw ConfigError("neural.layer_dims must be [2, h1, h2, 40]");
  }
  if (dims[1] <= 0 || dims[2] <= 0) {
    throw ConfigError("neural.layer_dims hidden widths must be > 0");
  }
  const auto& adam = c.neural.adam;
  if (!(adam.lr > 0.0)) throw ConfigError("neural.lr must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) {
    throw ConfigError("neural.beta1 must be in [0, 1)");
  }
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("neural.beta2 must be in [0, 1)");
  }
  if (!(adam.eps_hat > 0.0)) throw ConfigError("neural.eps_hat must be > 0");
  validate(c.agent);
  validate(c.validation);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"world", world_json(c.world)},
          {"rss", rss_json(c.rss)},
          {"sut", sut_json(c.sut)},
          {"neural", neural_json(c.neural)},
          {"agent", agent_json(c.agent)},
          {"validation", validation_json(c.validation)}};
}

ExperimentConfig config_from_json(const nlohmann::json& input) {
  const json* doc = &input;
  if (input.is_object() && input.contains("manifest_version")) {
    if (!input.contains("config")) {
      throw ConfigError("manifest has no 'config' member");
    }
    doc = &input.at("config");
  }
  if (!doc->is_object()) throw ConfigError("config document must be an object");

  ExperimentConfig c;
  for (const auto& [key, section] : doc->items()) {
    if (key == "world") {
      read_world(section, c.world);
    } else if (key == "rss") {
      read_rss(section, c.rss);
    } else if (key == "sut") {
      read_sut(section, c.sut);
    } else if (key == "neural") {
      read_neural(section, c.neural);
    } else if (key == "agent") {
      read_agent(section, c.agent);
    } else if (key == "validation") {
      read_validation(section, c.validation);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos ||
      dot > eq) {
    throw ConfigError("override must look like section.key=value, got '" +
                      std::string(assignment) + "'");
  }
  const std::string section(assignment.substr(0, dot));
  const std::string key(assignment.substr(dot + 1, eq - dot - 1));
  const std::string raw(assignment.substr(eq + 1));

  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;

  json doc = to_json(config);
  if (!doc.contains(section)) {
    throw ConfigError("unknown config key '" + section + "'");
  }
  if (!doc[section].contains(key)) {
    throw ConfigError("unknown config key '" + section + "." + key + "'");
  }
  doc[section][key] = std::move(value);
  config = config_from_json(doc);
}

}  // namespace edge_forge

// edge-forge: train an adversarial pedestrian against the reference
// collision-avoidance system, validate checkpoints, replay logged episodes
// and render reports.

#include <iostream>

#include "CLI11.hpp"
#include "edge_forge/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"Adversarial scenario generation and statistical validation "
               "for a collision-avoidance system"};
  app.require_subcommand(1);

  edge_forge::TrainOptions train;
  int train_episodes = -1;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train the adversary");
  train_cmd->add_option("--config", train.config_path, "Config or manifest");
  train_cmd->add_option("--out", train.out_dir, "Run directory")->required();
  auto* train_episodes_opt =
      train_cmd->add_option("--episodes", train_episodes, "Episode count");
  auto* train_seed_opt =
      train_cmd->add_option("--seed", train_seed, "World and agent seed");
  train_cmd->add_option("--set", train.overrides, "section.key=value")
      ->take_all()
      ->allow_extra_args(false);

  edge_forge::ValidateOptions validate;
  std::uint64_t validate_seed = 0;
  auto* validate_cmd =
      app.add_subcommand("validate", "Frozen-policy validation rollouts");
  validate_cmd->add_option("--checkpoint", validate.checkpoint, "Network JSON")->required();
  validate_cmd->add_option("--config", validate.config_path, "Config or manifest");
  validate_cmd->add_option("--out", validate.out_dir, "Output directory")->required();
  validate_cmd->add_option("--episodes", validate.episodes, "Rollout count");
  auto* validate_seed_opt = validate_cmd->add_option("--seed", validate_seed, "Evaluation seed (default world.seed)");
  validate_cmd->add_option("--set", validate.overrides, "section.key=value")->allow_extra_args(false);

  edge_forge::ReplayOptions replay;
  auto* replay_cmd =
      app.add_subcommand("replay", "Re-simulate and verify a logged episode");
  replay_cmd->add_option("--log", replay.episode_log, "Episode log")
      ->required();
  replay_cmd->add_option("--episode", replay.episode_id, "Episode id")
      ->required();
  replay_cmd->add_option("--config", replay.config_path,
                        "Config or manifest (default: manifest beside the log)");

  edge_forge::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Write summary, CSV and SVG");
  report_cmd->add_option("--out", report.run_dir, "Run directory")->required();
  report_cmd->add_option("--config", report.config_path, "Config or manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : edge_forge::kExitConfig;
  }

  if (*train_cmd) {
    if (*train_episodes_opt) train.episodes = train_episodes;
    if (*train_seed_opt) train.seed = train_seed;
    return edge_forge::cmd_train(train);
  }
  if (*validate_cmd) {
    if (*validate_seed_opt) validate.seed = validate_seed;
    return edge_forge::cmd_validate(validate);
  }
  if (*replay_cmd) return edge_forge::cmd_replay(replay, std::cout);
  return edge_forge::cmd_report(report);
}

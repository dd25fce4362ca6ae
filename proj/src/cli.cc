#include "edge_forge/cli.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string_view>

#include "edge_forge/agent.h"
#include "edge_forge/config.h"
#include "edge_forge/errors.h"
#include "edge_forge/rollout.h"

#ifndef EDGE_FORGE_VERSION
#define EDGE_FORGE_VERSION "dev"
#endif

namespace edge_forge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("EDGE_FORGE_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string_view v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static constexpr const char* kNames[] = {"error", "info", "debug"};
  std::cerr << "[edge-forge " << kNames[static_cast<int>(level)] << "] "
            << msg << '\n';
}

// Thrown for filesystem problems; mapped to kExitIo.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

ExperimentConfig resolve_config(const std::string& path,
                                const std::vector<std::string>& overrides) {
  ExperimentConfig config = path.empty() ? ExperimentConfig{} : load_config(path);
  for (const auto& o : overrides) apply_override(config, o);
  validate(config);
  return config;
}

std::vector<EpisodeRecord> read_episode_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read episode log " + path.string());
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(episode_from_json(json::parse(line)));
  }
  return out;
}

template <typename Fn>
int guarded(const char* name, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log(LogLevel::Error, std::string(name) + ": " + e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    log(LogLevel::Error, std::string(name) + ": " + e.what());
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    log(LogLevel::Error, std::string(name) + ": " + e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    log(LogLevel::Error, std::string(name) + ": " + e.what());
    return kExitFailure;
  }
}

json manifest_json(const ExperimentConfig& config, const std::string& start,
                   const std::string& end, const fs::path& out_dir) {
  json m;
  m["manifest_version"] = 1;
  m["code_version"] = std::string("edge-forge ") + EDGE_FORGE_VERSION;
  m["config"] = to_json(config);
  m["seed"] = config.agent.seed;
  m["start_time"] = start;
  m["end_time"] = end.empty() ? json(nullptr) : json(end);
  m["outputs"] = {
      {"episode_log", (out_dir / kEpisodeLogFile).string()},
      {"final_checkpoint", (out_dir / kFinalCheckpointFile).string()},
      {"checkpoint_dir", (out_dir / "checkpoints").string()}};
  return m;
}

ExperimentConfig config_for_log(const fs::path& log_path,
                                const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_config(explicit_path);
  const fs::path manifest = log_path.parent_path() / kManifestFile;
  if (fs::exists(manifest)) return load_config(manifest.string());
  log(LogLevel::Info, "no manifest next to " + log_path.string() +
                          "; using default config");
  return ExperimentConfig{};
}

// Log lines are serialized with sorted keys, so well-formed entries start
// with the episode id. Reading it without a full parse keeps replay linear
// in the log size. Lines without the prefix fall through to the full parser.
std::optional<std::int64_t> leading_episode_id(std::string_view line) {
  constexpr std::string_view kPrefix = "{\"episode_id\":";
  if (!line.starts_with(kPrefix)) return std::nullopt;
  line.remove_prefix(kPrefix.size());
  std::int64_t id = 0;
  const char* last = line.data() + line.size();
  const auto [end, ec] = std::from_chars(line.data(), last, id);
  if (ec != std::errc{} || end == last || *end != ',') {
    return std::nullopt;
  }
  return id;
}

}  // namespace

int cmd_train(const TrainOptions& options) {
  return guarded("train", [&] {
    ExperimentConfig config =
        resolve_config(options.config_path, options.overrides);
    if (options.episodes) {
      apply_override(config,
                     "agent.max_episodes=" + std::to_string(*options.episodes));
    }
    if (options.seed) {
      apply_override(config, "agent.seed=" + std::to_string(*options.seed));
      apply_override(config, "world.seed=" + std::to_string(*options.seed));
    }
    if (options.out_dir.empty()) throw ConfigError("train needs --out");
    const fs::path out(options.out_dir);
    ensure_dir(out / "checkpoints");

    const std::string start = timestamp();
    write_file(out / kManifestFile,
               manifest_json(config, start, "", out).dump(2) + "\n");

    std::ofstream episodes(out / kEpisodeLogFile,
                           std::ios::binary | std::ios::trunc);
    if (!episodes) throw IoError("cannot write episode log in " + out.string());

    const ReferenceCas sut(config.sut);
    std::int64_t failures = 0;
    const int every = config.agent.checkpoint_every;
    const auto result = run_training(
        config, sut, [&](const EpisodeRecord& ep, const Mlp& pred) {
          episodes << to_json(ep).dump() << '\n';
          if (!episodes) throw IoError("episode log write failed");
          if (ep.outcome == Outcome::FailureScenario) ++failures;
          const auto done = ep.episode_id + 1;
          if (every > 0 && done % every == 0) {
            char name[48];
            std::snprintf(name, sizeof name, "episode_%06lld.json",
                          static_cast<long long>(done));
            save_network(pred, (out / "checkpoints" / name).string());
          }
          if (done % 100 == 0) {
            log(LogLevel::Info, "episode " + std::to_string(done) +
                                    ": failures so far " +
                                    std::to_string(failures));
          }
          log(LogLevel::Debug,
              "episode " + std::to_string(ep.episode_id) + " reward " +
                  std::to_string(ep.total_reward) + " " +
                  std::string(to_string(ep.outcome)));
        });
    episodes.close();
    save_network(result.prediction, (out / kFinalCheckpointFile).string());
    write_file(out / kManifestFile,
               manifest_json(config, start, timestamp(), out).dump(2) + "\n");
    log(LogLevel::Info, "trained " + std::to_string(config.agent.max_episodes) +
                            " episodes into " + out.string());
    return kExitOk;
  });
}

int cmd_validate(const ValidateOptions& options) {
  return guarded("validate", [&] {
    const ExperimentConfig config =
        resolve_config(options.config_path, options.overrides);
    if (options.out_dir.empty()) throw ConfigError("validate needs --out");
    if (options.episodes < 1) throw ConfigError("--episodes must be >= 1");
    if (!fs::exists(options.checkpoint)) {
      throw ConfigError("checkpoint not found: " + options.checkpoint);
    }
    const Mlp net = load_network(options.checkpoint);
    if (net.layer_dims() != config.neural.layer_dims) {
      throw ConfigError("checkpoint layer_dims do not match neural.layer_dims");
    }
    const std::uint64_t seed = options.seed.value_or(config.world.seed);
    const ReferenceCas sut(config.sut);
    const auto records =
        evaluate_policy_parallel(net, config, sut, options.episodes, seed);
    const ValidationReport report = build_report(records, config.validation);

    const fs::path out(options.out_dir);
    ensure_dir(out);
    json doc = to_json(report);
    doc["checkpoint"] = options.checkpoint;
    doc["seed"] = seed;
    write_file(out / "validation_report.json", doc.dump(2) + "\n");
    std::string log_body;
    for (const auto& r : records) log_body += to_json(r).dump() + "\n";
    write_file(out / kEpisodeLogFile, log_body);
    write_file(out / "cumulative_failures.csv", cumulative_failures_csv(report));
    write_file(out / "reward_moving_average.csv", reward_curve_csv(report));
    log(LogLevel::Info, "p_r = " + format_probability(report.p_r) + " over " +
                            std::to_string(report.total_episodes) +
                            " episodes");
    return kExitOk;
  });
}

int cmd_replay(const ReplayOptions& options, std::ostream& table_out) {
  return guarded("replay", [&]() -> int {
    const fs::path log_path(options.episode_log);
    const ExperimentConfig config =
        config_for_log(log_path, options.config_path);

    std::ifstream in(log_path);
    if (!in) throw IoError("cannot read episode log " + log_path.string());
    std::optional<EpisodeRecord> stored;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (const auto id = leading_episode_id(line);
          id && *id != options.episode_id) {
        continue;
      }
      const json doc = json::parse(line, nullptr, false);
      if (doc.is_discarded() || !doc.is_object() ||
          !doc.contains("episode_id")) {
        log(LogLevel::Error, "corrupted entry on line " +
                                 std::to_string(line_no) + " of " +
                                 log_path.string());
        return kExitDiverged;
      }
      const auto id = doc["episode_id"];
      if (!id.is_number_integer() ||
          id.get<std::int64_t>() != options.episode_id) {
        continue;
      }
      try {
        stored = episode_from_json(doc);
      } catch (const std::exception& e) {
        log(LogLevel::Error, std::string("corrupted episode entry: ") +
                                 e.what());
        return kExitDiverged;
      }
      break;
    }
    if (!stored) {
      log(LogLevel::Error, "episode " + std::to_string(options.episode_id) +
                               " not found in " + log_path.string());
      return kExitConfig;
    }

    ReplayResult replay;
    try {
      replay = replay_episode(*stored, config, ReferenceCas(config.sut));
    } catch (const UsageError& e) {
      log(LogLevel::Error, std::string("stored actions are invalid: ") +
                               e.what());
      return kExitDiverged;
    }

    table_out << "episode " << stored->episode_id << " seed "
              << stored->episode_seed << " term "
              << to_string(replay.replayed.term_reason) << " reward "
              << replay.replayed.total_reward << " success_fraction "
              << std::fixed << std::setprecision(4)
              << replay.replayed.success_fraction << ' '
              << to_string(replay.replayed.outcome) << '\n';
    table_out << std::setw(5) << "step" << std::setw(8) << "t"
              << std::setw(8) << "action" << std::setw(10) << "ped_v"
              << std::setw(10) << "ego_v" << std::setw(10) << "d_eucl"
              << std::setw(10) << "d_rss" << std::setw(5) << "roi"
              << std::setw(8) << "reward" << "  class\n";
    for (const auto& ts : replay.replayed.timesteps) {
      table_out << std::setw(5) << ts.step << std::setw(8)
                << std::setprecision(2) << ts.t << std::setw(8) << ts.action
                << std::setw(10) << std::setprecision(3) << ts.ped_speed
                << std::setw(10) << ts.ego_speed << std::setw(10) << ts.d_eucl
                << std::setw(10) << ts.d_rss << std::setw(5)
                << (ts.in_roi ? "y" : "n") << std::setw(8) << ts.reward << "  "
                << to_string(ts.classification) << '\n';
    }
    table_out.unsetf(std::ios::floatfield);

    if (!replay.match) {
      log(LogLevel::Error,
          "replay diverged from the stored trace at timestep index " +
              std::to_string(replay.first_divergent_step));
      return kExitDiverged;
    }
    log(LogLevel::Info, "replay matches the stored trace");
    return kExitOk;
  });
}

int cmd_report(const ReportOptions& options) {
  return guarded("report", [&] {
    const fs::path run(options.run_dir);
    const fs::path log_path = run / kEpisodeLogFile;
    if (!fs::exists(log_path)) {
      throw ConfigError("no episode log in " + run.string());
    }
    const ExperimentConfig config = config_for_log(log_path,
                                                   options.config_path);
    const auto records = read_episode_log(log_path);
    if (records.empty()) {
      throw ConfigError("episode log " + log_path.string() + " is empty");
    }
    const ValidationReport report = build_report(records, config.validation);

    const fs::path out = run / "report";
    ensure_dir(out);
    json summary = to_json(report);
    summary["episode_log"] = log_path.string();
    write_file(out / "summary.json", summary.dump(2) + "\n");
    write_file(out / "cumulative_failures.csv", cumulative_failures_csv(report));
    write_file(out / "reward_moving_average.csv", reward_curve_csv(report));
    write_file(out / "cumulative_failures.svg", cumulative_failures_svg(report));
    write_file(out / "reward_moving_average.svg", reward_curve_svg(report));
    const auto top = extract_edge_cases(records, 1);
    write_file(out / "top_edge_case.svg", episode_trace_svg(top.front()));
    log(LogLevel::Info, "report written to " + out.string() + " (p_r " +
                            format_probability(report.p_r) + ")");
    return kExitOk;
  });
}

}  // namespace edge_forge

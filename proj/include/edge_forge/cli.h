#pragma once

// Subcommands behind the `edge-forge` executable. Each returns a process
// exit status; results go to files, diagnostics to stderr (level from the
// EDGE_FORGE_LOG environment variable: error, info or debug).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edge_forge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDiverged = 4;

// File names inside a run directory.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kEpisodeLogFile = "episodes.ndjson";
inline constexpr const char* kFinalCheckpointFile = "final_checkpoint.json";

struct TrainOptions {
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

struct ValidateOptions {
  std::string checkpoint;
  std::string config_path;
  std::string out_dir;
  int episodes = 100;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

struct ReplayOptions {
  std::string episode_log;
  std::int64_t episode_id = 0;
  // Empty: use the manifest next to the log, falling back to defaults.
  std::string config_path;
};

struct ReportOptions {
  std::string run_dir;
  std::string config_path;
};

int cmd_train(const TrainOptions& options);
int cmd_validate(const ValidateOptions& options);
int cmd_replay(const ReplayOptions& options, std::ostream& table_out);
int cmd_report(const ReportOptions& options);

}  // namespace edge_forge

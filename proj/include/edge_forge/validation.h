#pragma once

// Statistical validation of the SUT: per-timestep and per-episode
// classification against the RSS specification, the success probability,
// reward convergence and edge-case extraction.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edge_forge/rss.h"
#include "edge_forge/sim_env.h"
#include "json.hpp"

namespace edge_forge {

enum class TimestepClass { SuccessTs, FailureTs };
enum class Outcome { SuccessScenario, FailureScenario };

// Which timesteps form the denominator of an episode's success fraction.
enum class FractionBasis {
  AllTimesteps,  // every timestep counts
  RoiOnly,       // only timesteps with the pedestrian in the detection region
};

std::string_view to_string(TimestepClass c);
std::string_view to_string(Outcome o);
std::string_view to_string(FractionBasis b);
FractionBasis fraction_basis_from_string(std::string_view name);

struct ValidationConfig {
  double success_threshold = 0.75;
  FractionBasis fraction_basis = FractionBasis::AllTimesteps;
  int reward_window = 100;
  int top_k = 5;
};

void validate(const ValidationConfig& config);

struct TimestepRecord {
  int step = 0;  // 1-based index of the step that produced this state
  double t = 0.0;
  int action = 0;
  double ego_x = 0.0;
  double ego_y = 0.0;
  double ego_speed = 0.0;
  double ped_x = 0.0;
  double ped_y = 0.0;
  double ped_speed = 0.0;
  double d_eucl = 0.0;
  double d_rss = 0.0;
  bool in_roi = false;
  bool collided = false;
  int reward = 0;
  TimestepClass classification = TimestepClass::SuccessTs;

  bool operator==(const TimestepRecord&) const = default;
};

struct EpisodeRecord {
  std::int64_t episode_id = 0;
  std::uint64_t episode_seed = 0;
  std::vector<TimestepRecord> timesteps;
  TermReason term_reason = TermReason::Running;
  int total_reward = 0;
  double success_fraction = 1.0;
  Outcome outcome = Outcome::SuccessScenario;

  bool operator==(const EpisodeRecord&) const = default;
};

// FailureTs iff in_roi, not collided and d_eucl < d_rss.
TimestepClass classify_timestep(double d_eucl, double d_rss, bool in_roi,
                                bool collided);

// Record for the state reached after applying `action`.
TimestepRecord make_timestep_record(const SimState& state, int action,
                                    const WorldConfig& world,
                                    const RssParams& rss);

double success_fraction(std::span<const TimestepRecord> timesteps,
                        FractionBasis basis = FractionBasis::AllTimesteps);

// SuccessScenario iff the success fraction is strictly above the threshold.
// Throws UsageError for an episode without timesteps.
Outcome classify_episode(const EpisodeRecord& episode,
                         double threshold = 0.75,
                         FractionBasis basis = FractionBasis::AllTimesteps);

// Fills total_reward, success_fraction and outcome from the timesteps.
void finalize_episode(EpisodeRecord& episode, const ValidationConfig& config);

// success_count / total. Throws UsageError for an empty input.
double success_probability(std::span<const EpisodeRecord> records);
double success_probability(std::int64_t successes, std::int64_t total);

// Four-decimal rendering used in reports, e.g. "0.7277".
std::string format_probability(double p);

// Trailing moving average of total_reward; the first window-1 entries
// average over the available prefix.
std::vector<double> reward_curve(std::span<const EpisodeRecord> records,
                                 int window = 100);
std::vector<double> moving_average(std::span<const double> values,
                                   int window);

// Running count of failure scenarios after each episode.
std::vector<std::int64_t> cumulative_failures(
    std::span<const EpisodeRecord> records);

// Top-k episodes by total_reward (descending), ties by lower episode_id.
std::vector<EpisodeRecord> extract_edge_cases(
    std::span<const EpisodeRecord> records, int k);

// Smallest i with max - min of curve[i, i + span) <= tolerance.
std::optional<std::size_t> convergence_episode(std::span<const double> curve,
                                               double tolerance,
                                               std::size_t span);

struct EdgeCaseSummary {
  std::int64_t episode_id = 0;
  int total_reward = 0;
};

struct ValidationReport {
  std::int64_t total_episodes = 0;
  std::int64_t success_count = 0;
  std::int64_t failure_count = 0;
  double p_r = 0.0;
  std::vector<std::int64_t> cumulative_failures;
  std::vector<double> reward_moving_average;
  std::vector<EdgeCaseSummary> edge_cases;
};

// Throws UsageError for an empty input.
ValidationReport build_report(std::span<const EpisodeRecord> records,
                              const ValidationConfig& config);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const EpisodeRecord& episode);
EpisodeRecord episode_from_json(const nlohmann::json& doc);

// CSV bodies for external plotting.
std::string cumulative_failures_csv(const ValidationReport& report);
std::string reward_curve_csv(const ValidationReport& report);

// Standalone SVG line charts.
std::string cumulative_failures_svg(const ValidationReport& report);
std::string reward_curve_svg(const ValidationReport& report);
std::string episode_trace_svg(const EpisodeRecord& episode);

}  // namespace edge_forge

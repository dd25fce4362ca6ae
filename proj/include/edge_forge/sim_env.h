#pragma once

// Flat 2D pedestrian-crossing world. The ego vehicle drives along +x at
// y = 0 toward a crosswalk at x = crosswalk_x; the pedestrian crosses the
// lane along y, starting from one of two lateral offsets. The pedestrian's
// lateral speed is the adversary's action; the ego's longitudinal
// acceleration comes from a pluggable collision-avoidance system (the SUT).

#include <array>
#include <cstdint>
#include <string_view>

namespace edge_forge {

inline constexpr int kNumActions = 40;
inline constexpr double kActionSpeedStep = 0.25;  // m/s per action index

struct WorldConfig {
  double dt = 0.1;
  double ego_start_x = 0.0;
  double ego_target_speed = 8.0;
  double ego_speed_noise_sigma = 0.5;
  double crosswalk_x = 30.0;
  double lane_half_width = 2.0;
  std::array<double, 2> ped_start_offsets = {-7.0, 7.0};
  double detection_range = 10.0;
  double roi_lateral_halfwidth = 2.0;
  double collision_radius = 0.5;
  double max_travel = 40.0;
  double max_sim_time = 100.0;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the first offending field.
void validate(const WorldConfig& config);

// Upper bound on the number of steps in one episode.
int max_steps(const WorldConfig& config);

enum class TermReason { Running, MaxTravel, MaxTime, Collision };

std::string_view to_string(TermReason reason);
TermReason term_reason_from_string(std::string_view name);

struct SimState {
  int step_count = 0;
  double t = 0.0;
  double ego_x = 0.0;
  double ego_y = 0.0;
  double ego_speed = 0.0;
  // Speed the ego resumes to after braking; drawn once per episode.
  double ego_cruise_speed = 0.0;
  double ped_x = 0.0;
  double ped_y = 0.0;
  double ped_speed = 0.0;
  // +1 or -1: the pedestrian always walks toward and past the lane center.
  double ped_dir = 1.0;
  std::uint64_t episode_seed = 0;
  bool terminated = false;
  TermReason term_reason = TermReason::Running;

  bool operator==(const SimState&) const = default;
};

// Observation for the adversary.
struct AgentState {
  double rel_speed = 0.0;    // pedestrian speed minus ego speed
  double euclid_dist = 0.0;  // straight-line ego to pedestrian distance

  bool operator==(const AgentState&) const = default;
};

class PedAction {
 public:
  // Throws UsageError outside [0, kNumActions).
  explicit PedAction(int index);

  int index() const { return index_; }
  double speed() const { return index_ * kActionSpeedStep; }

  bool operator==(const PedAction&) const = default;

 private:
  int index_;
};

// System under test. Implementations must be safe to call concurrently on
// distinct states.
class CollisionAvoidanceSystem {
 public:
  virtual ~CollisionAvoidanceSystem() = default;
  // Longitudinal acceleration command for the ego (m/s^2).
  virtual double acceleration(const SimState& state,
                              const WorldConfig& config) const = 0;
};

struct CasParams {
  double brake_decel = 4.0;  // applied while the pedestrian is detected
  double max_accel = 2.0;    // cap on the resume command
  double gain = 1.0;         // 1/s, proportional resume toward cruise speed
};

void validate(const CasParams& params);

// Built-in reference SUT: constant braking while the pedestrian is inside
// the detection region, otherwise proportional resume toward the cruise
// speed.
class ReferenceCas final : public CollisionAvoidanceSystem {
 public:
  ReferenceCas() = default;
  explicit ReferenceCas(CasParams params);

  double acceleration(const SimState& state,
                      const WorldConfig& config) const override;

  const CasParams& params() const { return params_; }

 private:
  CasParams params_;
};

double cas_control(const SimState& state, const WorldConfig& config);

bool in_detection_region(const SimState& state, const WorldConfig& config);

AgentState observe(const SimState& state);

SimState reset(const WorldConfig& config, std::uint64_t episode_seed);

struct StepResult {
  SimState state;
  AgentState observation;
  bool terminated = false;
};

// Throws UsageError if `state` has already terminated.
StepResult step(const SimState& state, PedAction action,
                const WorldConfig& config,
                const CollisionAvoidanceSystem& sut);
StepResult step(const SimState& state, PedAction action,
                const WorldConfig& config);

// Per-episode generator seed derived from a run seed and an episode index.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream);

}  // namespace edge_forge

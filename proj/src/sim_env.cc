#include "edge_forge/sim_env.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "edge_forge/errors.h"

namespace edge_forge {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw ConfigError(std::string("world.") + field + " " + rule);
  }
}

bool finite(double v) { return std::isfinite(v); }

// Closest approach between ego and pedestrian over one step, with both
// moving linearly from their previous to their new positions.
double swept_min_distance(double dx0, double dy0, double dx1, double dy1) {
  const double ux = dx1 - dx0;
  const double uy = dy1 - dy0;
  const double uu = ux * ux + uy * uy;
  double tau = 1.0;
  if (uu > 0.0) {
    tau = std::clamp(-(dx0 * ux + dy0 * uy) / uu, 0.0, 1.0);
  }
  return std::hypot(dx0 + tau * ux, dy0 + tau * uy);
}

}  // namespace

void validate(const WorldConfig& c) {
  require(finite(c.dt) && c.dt > 0.0, "dt", "must be > 0");
  require(finite(c.ego_start_x), "ego_start_x", "must be finite");
  require(finite(c.ego_target_speed) && c.ego_target_speed >= 0.0,
          "ego_target_speed", "must be >= 0");
  require(finite(c.ego_speed_noise_sigma) && c.ego_speed_noise_sigma >= 0.0,
          "ego_speed_noise_sigma", "must be >= 0");
  require(finite(c.crosswalk_x), "crosswalk_x", "must be finite");
  require(finite(c.lane_half_width) && c.lane_half_width > 0.0,
          "lane_half_width", "must be > 0");
  require(finite(c.ped_start_offsets[0]) && finite(c.ped_start_offsets[1]),
          "ped_start_offsets", "must be finite");
  require(finite(c.detection_range) && c.detection_range > 0.0,
          "detection_range", "must be > 0");
  require(finite(c.roi_lateral_halfwidth) && c.roi_lateral_halfwidth >= 0.0,
          "roi_lateral_halfwidth", "must be >= 0");
  require(finite(c.collision_radius) && c.collision_radius > 0.0,
          "collision_radius", "must be > 0");
  require(finite(c.max_travel) && c.max_travel > 0.0, "max_travel",
          "must be > 0");
  require(finite(c.max_sim_time) && c.max_sim_time > 0.0, "max_sim_time",
          "must be > 0");
}

int max_steps(const WorldConfig& config) {
  return static_cast<int>(std::ceil(config.max_sim_time / config.dt - 1e-9));
}

std::string_view to_string(TermReason reason) {
  switch (reason) {
    case TermReason::Running:
      return "Running";
    case TermReason::MaxTravel:
      return "MaxTravel";
    case TermReason::MaxTime:
      return "MaxTime";
    case TermReason::Collision:
      return "Collision";
  }
  return "Running";
}

TermReason term_reason_from_string(std::string_view name) {
  for (auto r : {TermReason::Running, TermReason::MaxTravel,
                 TermReason::MaxTime, TermReason::Collision}) {
    if (to_string(r) == name) return r;
  }
  throw UsageError("unknown termination reason: " + std::string(name));
}

PedAction::PedAction(int index) : index_(index) {
  if (index < 0 || index >= kNumActions) {
    throw UsageError("pedestrian action index out of range: " +
                     std::to_string(index));
  }
}

void validate(const CasParams& p) {
  if (!(std::isfinite(p.brake_decel) && p.brake_decel > 0.0)) {
    throw ConfigError("sut.brake_decel must be > 0");
  }
  if (!(std::isfinite(p.max_accel) && p.max_accel >= 0.0)) {
    throw ConfigError("sut.max_accel must be >= 0");
  }
  if (!(std::isfinite(p.gain) && p.gain >= 0.0)) {
    throw ConfigError("sut.gain must be >= 0");
  }
}

ReferenceCas::ReferenceCas(CasParams params) : params_(params) {
  validate(params_);
}

double ReferenceCas::acceleration(const SimState& state,
                                  const WorldConfig& config) const {
  if (in_detection_region(state, config)) {
    return -params_.brake_decel;
  }
  const double cmd = params_.gain * (state.ego_cruise_speed - state.ego_speed);
  return std::min(cmd, params_.max_accel);
}

double cas_control(const SimState& state, const WorldConfig& config) {
  static const ReferenceCas kReference;
  return kReference.acceleration(state, config);
}

bool in_detection_region(const SimState& s, const WorldConfig& config) {
  const double dx = s.ped_x - s.ego_x;
  const double dy = s.ped_y - s.ego_y;
  return dx > 0.0 && std::hypot(dx, dy) <= config.detection_range &&
         std::abs(dy) <= config.roi_lateral_halfwidth;
}

AgentState observe(const SimState& s) {
  return AgentState{s.ped_speed - s.ego_speed,
                    std::hypot(s.ped_x - s.ego_x, s.ped_y - s.ego_y)};
}

SimState reset(const WorldConfig& config, std::uint64_t episode_seed) {
  validate(config);
  std::mt19937_64 rng(episode_seed);

  SimState s;
  s.episode_seed = episode_seed;
  s.ego_x = config.ego_start_x;
  s.ego_y = 0.0;

  const double sigma = config.ego_speed_noise_sigma;
  double speed = config.ego_target_speed;
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    speed += noise(rng);
  }
  s.ego_speed = std::clamp(speed, 0.0, config.ego_target_speed + 3.0 * sigma);
  s.ego_cruise_speed = s.ego_speed;

  std::uniform_int_distribution<int> side(0, 1);
  const double offset = config.ped_start_offsets[side(rng)];
  s.ped_x = config.crosswalk_x;
  s.ped_y = offset;
  s.ped_dir = offset > 0.0 ? -1.0 : 1.0;

  std::uniform_int_distribution<int> initial(0, kNumActions - 1);
  s.ped_speed = PedAction(initial(rng)).speed();
  return s;
}

StepResult step(const SimState& state, PedAction action,
                const WorldConfig& config,
                const CollisionAvoidanceSystem& sut) {
  if (state.terminated) {
    throw UsageError("step called on a terminated episode");
  }
  SimState next = state;
  next.ped_speed = action.speed();

  const double accel = sut.acceleration(state, config);
  next.ego_speed = std::max(0.0, state.ego_speed + accel * config.dt);
  next.ego_x = state.ego_x + next.ego_speed * config.dt;
  next.ped_y = state.ped_y + state.ped_dir * next.ped_speed * config.dt;
  next.step_count = state.step_count + 1;
  next.t = next.step_count * config.dt;

  const double closest =
      swept_min_distance(state.ped_x - state.ego_x, state.ped_y - state.ego_y,
                         next.ped_x - next.ego_x, next.ped_y - next.ego_y);
  if (closest < config.collision_radius) {
    next.term_reason = TermReason::Collision;
  } else if (next.ego_x - config.ego_start_x > config.max_travel) {
    next.term_reason = TermReason::MaxTravel;
  } else if (next.step_count >= max_steps(config)) {
    next.term_reason = TermReason::MaxTime;
  }
  next.terminated = next.term_reason != TermReason::Running;
  return StepResult{next, observe(next), next.terminated};
}

StepResult step(const SimState& state, PedAction action,
                const WorldConfig& config) {
  static const ReferenceCas kReference;
  return step(state, action, config, kReference);
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace edge_forge

#pragma once

#include <string_view>

#include "edge_forge/sim_env.h"

namespace edge_forge {

// Parameters of the longitudinal RSS safe-distance rule.
struct RssParams {
  double rho = 0.5;          // response time (s)
  double a_max_accel = 2.0;  // max acceleration during the response time
  double a_min_brake = 4.0;  // minimum reasonable braking of the ego
  double a_max_brake = 8.0;  // maximum braking of the front object
};

void validate(const RssParams& params);

// Minimum longitudinal gap the rear (ego) vehicle needs to stop in time if
// the front object brakes at full strength:
//
//   v_r*rho + a_accel*rho^2/2 + (v_r + rho*a_accel)^2 / (2*a_min_brake)
//           - v_f^2 / (2*a_max_brake)
//
// clamped below at 0. Throws DomainError for negative or non-finite speeds
// and ConfigError for invalid parameters.
double safe_longitudinal_distance(double v_rear, double v_front,
                                  const RssParams& params);

// True iff the measured separation is strictly below the safe distance.
bool is_dangerous(double d_eucl, double d_min);

enum class RewardCause { UnsafeDistance, SafeDistance, OutOfRoiOrCollision };

std::string_view to_string(RewardCause cause);

struct RewardValue {
  int value = 0;  // +2, -2 or 0
  RewardCause cause = RewardCause::OutOfRoiOrCollision;
};

inline constexpr int kUnsafeReward = 2;
inline constexpr int kSafeReward = -2;

// Adversary reward for the state reached after a step. The pedestrian is
// treated as a stationary front object (v_f = 0).
RewardValue compute_reward(const SimState& state, const WorldConfig& config,
                           const RssParams& params);

}  // namespace edge_forge

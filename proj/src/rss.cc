#include "edge_forge/rss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "edge_forge/errors.h"

namespace edge_forge {

void validate(const RssParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.rho)) throw ConfigError("rss.rho must be > 0");
  if (!(std::isfinite(p.a_max_accel) && p.a_max_accel >= 0.0)) {
    throw ConfigError("rss.a_max_accel must be >= 0");
  }
  if (!positive(p.a_min_brake)) throw ConfigError("rss.a_min_brake must be > 0");
  if (!positive(p.a_max_brake)) throw ConfigError("rss.a_max_brake must be > 0");
}

double safe_longitudinal_distance(double v_rear, double v_front,
                                  const RssParams& p) {
  validate(p);
  if (!std::isfinite(v_rear) || v_rear < 0.0) {
    throw DomainError("rear speed must be finite and >= 0, got " +
                      std::to_string(v_rear));
  }
  if (!std::isfinite(v_front) || v_front < 0.0) {
    throw DomainError("front speed must be finite and >= 0, got " +
                      std::to_string(v_front));
  }
  const double v_after_response = v_rear + p.rho * p.a_max_accel;
  const double d = v_rear * p.rho + 0.5 * p.a_max_accel * p.rho * p.rho +
                   v_after_response * v_after_response / (2.0 * p.a_min_brake) -
                   v_front * v_front / (2.0 * p.a_max_brake);
  return std::max(0.0, d);
}

bool is_dangerous(double d_eucl, double d_min) { return d_eucl < d_min; }

std::string_view to_string(RewardCause cause) {
  switch (cause) {
    case RewardCause::UnsafeDistance:
      return "UnsafeDistance";
    case RewardCause::SafeDistance:
      return "SafeDistance";
    case RewardCause::OutOfRoiOrCollision:
      return "OutOfRoiOrCollision";
  }
  return "OutOfRoiOrCollision";
}

RewardValue compute_reward(const SimState& state, const WorldConfig& config,
                           const RssParams& params) {
  if (state.term_reason == TermReason::Collision ||
      !in_detection_region(state, config)) {
    return {0, RewardCause::OutOfRoiOrCollision};
  }
  const double d_min = safe_longitudinal_distance(state.ego_speed, 0.0, params);
  if (is_dangerous(observe(state).euclid_dist, d_min)) {
    return {kUnsafeReward, RewardCause::UnsafeDistance};
  }
  return {kSafeReward, RewardCause::SafeDistance};
}

}  // namespace edge_forge

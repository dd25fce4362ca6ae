#pragma once

// Reference computations used as independent oracles in tests. Nothing here
// calls into the library code paths being checked.

#include <algorithm>
#include <array>
#include <cmath>

namespace edge_forge::testing {

struct RssVector {
  double v_r, v_f, rho, a_accel, a_min_brake, a_max_brake;
};

// Safe distance evaluated term by term with the quadratic expanded, clamped
// at zero.
inline double rss_term_by_term(const RssVector& p) {
  const double reaction = p.v_r * p.rho;
  const double accel_during_reaction = 0.5 * p.a_accel * p.rho * p.rho;
  const double ego_braking =
      (p.v_r * p.v_r + 2.0 * p.v_r * p.rho * p.a_accel +
       p.rho * p.rho * p.a_accel * p.a_accel) /
      (2.0 * p.a_min_brake);
  const double front_braking = p.v_f * p.v_f / (2.0 * p.a_max_brake);
  const double raw =
      reaction + accel_during_reaction + ego_braking - front_braking;
  return raw > 0.0 ? raw : 0.0;
}

// Deterministic two-state, two-action MDP:
//   s0 --a0--> s0 (r = 1)    s0 --a1--> s1 (r = 0)
//   s1 --a0--> s0 (r = 0)    s1 --a1--> s1 (r = 2)
struct ToyMdp {
  static constexpr int kStates = 2;
  static constexpr int kActions = 2;
  static int next(int s, int a) {
    static constexpr int kNext[2][2] = {{0, 1}, {0, 1}};
    return kNext[s][a];
  }
  static double reward(int s, int a) {
    static constexpr double kReward[2][2] = {{1.0, 0.0}, {0.0, 2.0}};
    return kReward[s][a];
  }
};

// Q* by value iteration to machine precision.
inline std::array<std::array<double, 2>, 2> toy_value_iteration(double gamma) {
  std::array<std::array<double, 2>, 2> q{};
  for (int it = 0; it < 100000; ++it) {
    auto next = q;
    double change = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        const int sn = ToyMdp::next(s, a);
        next[s][a] = ToyMdp::reward(s, a) +
                     gamma * std::max(q[sn][0], q[sn][1]);
        change = std::max(change, std::abs(next[s][a] - q[s][a]));
      }
    }
    q = next;
    if (change < 1e-14) break;
  }
  return q;
}

}  // namespace edge_forge::testing

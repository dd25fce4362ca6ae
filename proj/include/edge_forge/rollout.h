#pragma once

// Frozen-policy episode rollouts. Evaluation episodes are independent: each
// draws its initial conditions from derive_seed(seed, episode_id), so the
// OpenMP kernel and the serial reference produce identical records in the
// same order regardless of thread count.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "edge_forge/neural.h"
#include "edge_forge/rss.h"
#include "edge_forge/sim_env.h"
#include "edge_forge/validation.h"

namespace edge_forge {

struct ExperimentConfig;

using Policy = std::function<PedAction(const AgentState&, int step_index)>;

// Runs one episode from reset(world, episode_seed) to termination.
EpisodeRecord run_episode(const ExperimentConfig& config,
                          const CollisionAvoidanceSystem& sut,
                          std::int64_t episode_id, std::uint64_t episode_seed,
                          const Policy& policy);

// Greedy (epsilon = 0) action of a Q-network.
PedAction greedy_policy_action(const Mlp& net, const AgentState& s);

std::vector<EpisodeRecord> evaluate_policy_serial(
    const Mlp& net, const ExperimentConfig& config,
    const CollisionAvoidanceSystem& sut, int n_episodes, std::uint64_t seed);

// Same contract as the serial version; episodes fan out over OpenMP threads.
std::vector<EpisodeRecord> evaluate_policy_parallel(
    const Mlp& net, const ExperimentConfig& config,
    const CollisionAvoidanceSystem& sut, int n_episodes, std::uint64_t seed);

// Re-simulates the stored action sequence. Returns true iff every timestep
// record and the termination reason match bit for bit.
struct ReplayResult {
  bool match = false;
  EpisodeRecord replayed;
  int first_divergent_step = -1;  // index into timesteps, -1 if none
};

ReplayResult replay_episode(const EpisodeRecord& stored,
                            const ExperimentConfig& config,
                            const CollisionAvoidanceSystem& sut);

}  // namespace edge_forge

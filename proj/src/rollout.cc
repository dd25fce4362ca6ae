#include "edge_forge/rollout.h"

#include <algorithm>

#include "edge_forge/agent.h"
#include "edge_forge/config.h"

namespace edge_forge {

EpisodeRecord run_episode(const ExperimentConfig& config,
                          const CollisionAvoidanceSystem& sut,
                          std::int64_t episode_id, std::uint64_t episode_seed,
                          const Policy& policy) {
  EpisodeRecord record;
  record.episode_id = episode_id;
  record.episode_seed = episode_seed;

  SimState state = reset(config.world, episode_seed);
  AgentState obs = observe(state);
  int index = 0;
  while (!state.terminated) {
    const PedAction action = policy(obs, index++);
    const StepResult next = step(state, action, config.world, sut);
    record.timesteps.push_back(make_timestep_record(
        next.state, action.index(), config.world, config.rss));
    state = next.state;
    obs = next.observation;
  }
  record.term_reason = state.term_reason;
  finalize_episode(record, config.validation);
  return record;
}

PedAction greedy_policy_action(const Mlp& net, const AgentState& s) {
  return greedy_action(net.forward(encode_state(s)));
}

std::vector<EpisodeRecord> evaluate_policy_serial(
    const Mlp& net, const ExperimentConfig& config,
    const CollisionAvoidanceSystem& sut, int n_episodes, std::uint64_t seed) {
  validate(config);
  const Policy policy = [&net](const AgentState& s, int) {
    return greedy_policy_action(net, s);
  };
  std::vector<EpisodeRecord> out;
  out.reserve(std::max(n_episodes, 0));
  for (int i = 0; i < n_episodes; ++i) {
    out.push_back(run_episode(config, sut, i, derive_seed(seed, i), policy));
  }
  return out;
}

std::vector<EpisodeRecord> evaluate_policy_parallel(
    const Mlp& net, const ExperimentConfig& config,
    const CollisionAvoidanceSystem& sut, int n_episodes, std::uint64_t seed) {
  validate(config);
  const Policy policy = [&net](const AgentState& s, int) {
    return greedy_policy_action(net, s);
  };
  std::vector<EpisodeRecord> out(std::max(n_episodes, 0));
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n_episodes; ++i) {
    out[i] = run_episode(config, sut, i, derive_seed(seed, i), policy);
  }
  return out;
}

ReplayResult replay_episode(const EpisodeRecord& stored,
                            const ExperimentConfig& config,
                            const CollisionAvoidanceSystem& sut) {
  const auto& steps = stored.timesteps;
  // Once the stored actions run out, keep the pedestrian still; any extra
  // step already means a divergence.
  const Policy scripted = [&steps](const AgentState&, int i) {
    return PedAction(i < static_cast<int>(steps.size()) ? steps[i].action : 0);
  };

  ReplayResult result;
  result.replayed = run_episode(config, sut, stored.episode_id,
                                stored.episode_seed, scripted);
  const auto& again = result.replayed.timesteps;
  const std::size_t common = std::min(again.size(), steps.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (!(again[i] == steps[i])) {
      result.first_divergent_step = static_cast<int>(i);
      break;
    }
  }
  if (result.first_divergent_step < 0 && again.size() != steps.size()) {
    result.first_divergent_step = static_cast<int>(common);
  }
  result.match = result.first_divergent_step < 0 && result.replayed == stored;
  return result;
}

}  // namespace edge_forge

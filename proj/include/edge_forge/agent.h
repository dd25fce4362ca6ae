#pragma once

// The adversary: a DQN controlling the pedestrian's speed, plus the tabular
// Q-learning update used as a cross-check for the temporal-difference
// machinery.

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "edge_forge/neural.h"
#include "edge_forge/rss.h"
#include "edge_forge/sim_env.h"
#include "edge_forge/validation.h"

namespace edge_forge {

struct TrainConfig {
  double gamma = 0.95;
  double alpha = 0.1;
  int batch_size = 32;
  int replay_capacity = 2000;
  int target_sync_every = 25;  // episodes
  double eps_start = 1.0;
  double eps_decay = 0.995;  // per environment timestep
  double eps_min = 0.001;
  int max_episodes = 1500;
  int checkpoint_every = 0;  // episodes; 0 disables periodic checkpoints
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

// Network input: rel_speed / 10 and euclid_dist / 50.
std::array<double, 2> encode_state(const AgentState& s);

struct Transition {
  AgentState state;
  int action = 0;
  int reward = 0;
  AgentState next_state;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

// Bounded FIFO of transitions; pushing into a full buffer evicts the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2000);

  void push(const Transition& t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // n distinct transitions, uniformly at random. Throws UsageError if n
  // exceeds size().
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

// max(eps_min, eps_start * eps_decay^timestep_count)
double epsilon_at(std::int64_t timestep_count, const TrainConfig& config);

// With probability epsilon a uniform action, otherwise the argmax of
// q_values (lowest index wins ties).
PedAction select_action(std::span<const double> q_values, double epsilon,
                        std::mt19937_64& rng);
PedAction greedy_action(std::span<const double> q_values);

// r + gamma * max_a' Q_target(s', a'), or r alone on terminal transitions.
std::vector<double> td_targets(std::span<const Transition> batch,
                               const Mlp& target_net, double gamma);

// One gradient step on a uniformly sampled batch. Returns nullopt without
// touching anything while the buffer holds fewer than batch_size items.
std::optional<double> dqn_train_step(Mlp& pred, const Mlp& target,
                                     AdamState& opt, const ReplayBuffer& buf,
                                     const TrainConfig& config,
                                     std::mt19937_64& rng);

// Uniform grid over (rel_speed, euclid_dist); out-of-range values clamp to
// the boundary bins.
struct StateBinning {
  int speed_bins = 20;
  double speed_lo = -20.0;
  double speed_hi = 10.0;
  int dist_bins = 25;
  double dist_lo = 0.0;
  double dist_hi = 50.0;

  int num_states() const { return speed_bins * dist_bins; }
  int index(const AgentState& s) const;
};

class QTable {
 public:
  QTable(int num_states, int num_actions);
  explicit QTable(const StateBinning& binning, int num_actions = kNumActions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double& at(int state, int action);
  double at(int state, int action) const;
  double max_value(int state) const;
  int state_index(const AgentState& s) const;

 private:
  int num_states_;
  int num_actions_;
  std::optional<StateBinning> binning_;
  std::vector<double> values_;
};

// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); the max term is
// dropped when done.
void tabular_update(QTable& table, int state, int action, double reward,
                    int next_state, bool done, double alpha, double gamma);
void tabular_update(QTable& table, const Transition& tr, double alpha,
                    double gamma);

struct TrainingResult {
  Mlp prediction;
  Mlp target;
  std::vector<int> sync_episodes;  // 1-based episode counts at each sync
  std::int64_t total_timesteps = 0;
};

// Called after every finished episode with the prediction network as it
// stands at that point.
using EpisodeSink = std::function<void(const EpisodeRecord&, const Mlp&)>;

struct ExperimentConfig;

// Full adversarial training loop; deterministic given the configs.
TrainingResult run_training(const ExperimentConfig& config,
                            const CollisionAvoidanceSystem& sut,
                            const EpisodeSink& sink);

}  // namespace edge_forge

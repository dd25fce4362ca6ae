#include "edge_forge/agent.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edge_forge/config.h"
#include "edge_forge/errors.h"

namespace edge_forge {

void validate(const TrainConfig& c) {
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) {
    throw ConfigError("agent.gamma must be in (0, 1)");
  }
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw ConfigError("agent.alpha must be in [0, 1]");
  }
  if (c.replay_capacity < 1) {
    throw ConfigError("agent.replay_capacity must be >= 1");
  }
  if (c.batch_size < 1 || c.batch_size > c.replay_capacity) {
    throw ConfigError("agent.batch_size must be in [1, replay_capacity]");
  }
  if (c.target_sync_every < 1) {
    throw ConfigError("agent.target_sync_every must be >= 1");
  }
  if (!(c.eps_start >= 0.0 && c.eps_start <= 1.0)) {
    throw ConfigError("agent.eps_start must be in [0, 1]");
  }
  if (!(c.eps_decay > 0.0 && c.eps_decay < 1.0)) {
    throw ConfigError("agent.eps_decay must be in (0, 1)");
  }
  if (!(c.eps_min > 0.0 && c.eps_min <= 1.0)) {
    throw ConfigError("agent.eps_min must be in (0, 1]");
  }
  if (c.max_episodes < 0) throw ConfigError("agent.max_episodes must be >= 0");
  if (c.checkpoint_every < 0) {
    throw ConfigError("agent.checkpoint_every must be >= 0");
  }
}

std::array<double, 2> encode_state(const AgentState& s) {
  return {s.rel_speed / 10.0, s.euclid_dist / 50.0};
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(t);
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n,
                                             std::mt19937_64& rng) const {
  if (n > items_.size()) {
    throw UsageError("cannot sample " + std::to_string(n) + " of " +
                     std::to_string(items_.size()) + " transitions");
  }
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(items_[idx[i]]);
  }
  return out;
}

double epsilon_at(std::int64_t timestep_count, const TrainConfig& c) {
  if (timestep_count < 0) throw UsageError("negative timestep count");
  const double eps =
      c.eps_start * std::pow(c.eps_decay, static_cast<double>(timestep_count));
  return std::max(c.eps_min, eps);
}

PedAction greedy_action(std::span<const double> q_values) {
  if (q_values.size() != static_cast<std::size_t>(kNumActions)) {
    throw UsageError("expected one Q value per pedestrian action");
  }
  // max_element returns the first maximum.
  const auto best = std::max_element(q_values.begin(), q_values.end());
  return PedAction(static_cast<int>(best - q_values.begin()));
}

PedAction select_action(std::span<const double> q_values, double epsilon,
                        std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw UsageError("epsilon must be in [0, 1]");
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> any(0, kNumActions - 1);
    return PedAction(any(rng));
  }
  return greedy_action(q_values);
}

std::vector<double> td_targets(std::span<const Transition> batch,
                               const Mlp& target_net, double gamma) {
  if (batch.empty()) throw UsageError("td_targets on an empty batch");
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& tr : batch) {
    double y = tr.reward;
    if (!tr.done) {
      const auto q = target_net.forward(encode_state(tr.next_state));
      y += gamma * *std::max_element(q.begin(), q.end());
    }
    out.push_back(y);
  }
  return out;
}

std::optional<double> dqn_train_step(Mlp& pred, const Mlp& target,
                                     AdamState& opt, const ReplayBuffer& buf,
                                     const TrainConfig& config,
                                     std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(config.batch_size);
  if (buf.size() < n) return std::nullopt;
  const auto batch = buf.sample(n, rng);
  const auto targets = td_targets(batch, target, config.gamma);
  std::vector<double> inputs;
  inputs.reserve(2 * n);
  std::vector<int> actions;
  actions.reserve(n);
  for (const auto& tr : batch) {
    const auto x = encode_state(tr.state);
    inputs.insert(inputs.end(), x.begin(), x.end());
    actions.push_back(tr.action);
  }
  return train_on_batch(pred, opt, Batch{inputs, targets, actions});
}

int StateBinning::index(const AgentState& s) const {
  auto bin = [](double v, double lo, double hi, int bins) {
    const double f = (v - lo) / (hi - lo) * bins;
    return std::clamp(static_cast<int>(std::floor(f)), 0, bins - 1);
  };
  const int sb = bin(s.rel_speed, speed_lo, speed_hi, speed_bins);
  const int db = bin(s.euclid_dist, dist_lo, dist_hi, dist_bins);
  return sb * dist_bins + db;
}

QTable::QTable(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1) {
    throw ConfigError("Q-table needs at least one state and one action");
  }
  values_.assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
}

QTable::QTable(const StateBinning& binning, int num_actions)
    : QTable(binning.num_states(), num_actions) {
  binning_ = binning;
}

double& QTable::at(int state, int action) {
  return values_.at(static_cast<std::size_t>(state) * num_actions_ + action);
}

double QTable::at(int state, int action) const {
  return values_.at(static_cast<std::size_t>(state) * num_actions_ + action);
}

double QTable::max_value(int state) const {
  const auto first =
      values_.begin() + static_cast<std::ptrdiff_t>(state) * num_actions_;
  return *std::max_element(first, first + num_actions_);
}

int QTable::state_index(const AgentState& s) const {
  if (!binning_) throw UsageError("Q-table has no state binning");
  return binning_->index(s);
}

void tabular_update(QTable& table, int state, int action, double reward,
                    int next_state, bool done, double alpha, double gamma) {
  double target = reward;
  if (!done) target += gamma * table.max_value(next_state);
  double& q = table.at(state, action);
  q += alpha * (target - q);
}

void tabular_update(QTable& table, const Transition& tr, double alpha,
                    double gamma) {
  tabular_update(table, table.state_index(tr.state), tr.action, tr.reward,
                 table.state_index(tr.next_state), tr.done, alpha, gamma);
}

TrainingResult run_training(const ExperimentConfig& config,
                            const CollisionAvoidanceSystem& sut,
                            const EpisodeSink& sink) {
  validate(config);
  const auto& agent = config.agent;

  TrainingResult result;
  result.prediction =
      mlp_init(config.neural.layer_dims, derive_seed(agent.seed, 1));
  result.target = result.prediction;
  Mlp& pred = result.prediction;
  Mlp& target = result.target;
  AdamState opt(pred, config.neural.adam);
  ReplayBuffer buffer(static_cast<std::size_t>(agent.replay_capacity));
  std::mt19937_64 rng(derive_seed(agent.seed, 2));

  std::int64_t timesteps = 0;
  for (int ep = 0; ep < agent.max_episodes; ++ep) {
    EpisodeRecord record;
    record.episode_id = ep;
    record.episode_seed = derive_seed(config.world.seed, ep);

    SimState state = reset(config.world, record.episode_seed);
    AgentState obs = observe(state);
    while (!state.terminated) {
      const auto q = pred.forward(encode_state(obs));
      const PedAction action =
          select_action(q, epsilon_at(timesteps, agent), rng);
      const StepResult next = step(state, action, config.world, sut);
      const TimestepRecord ts = make_timestep_record(
          next.state, action.index(), config.world, config.rss);
      buffer.push(Transition{obs, action.index(), ts.reward, next.observation,
                             next.terminated});
      dqn_train_step(pred, target, opt, buffer, agent, rng);
      record.timesteps.push_back(ts);
      ++timesteps;
      state = next.state;
      obs = next.observation;
    }
    record.term_reason = state.term_reason;
    finalize_episode(record, config.validation);

    if ((ep + 1) % agent.target_sync_every == 0) {
      copy_parameters(pred, target);
      result.sync_episodes.push_back(ep + 1);
    }
    if (sink) sink(record, pred);
  }
  result.total_timesteps = timesteps;
  return result;
}

}  // namespace edge_forge

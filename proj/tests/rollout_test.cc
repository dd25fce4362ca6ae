#include "edge_forge/rollout.h"

#include <gtest/gtest.h>

#include <random>

#include "edge_forge/config.h"

namespace edge_forge {
namespace {

TEST(Evaluation, ParallelMatchesSerialReference) {
  const ExperimentConfig config;
  const ReferenceCas sut;
  for (std::uint64_t net_seed : {1u, 2u, 3u}) {
    const Mlp net = mlp_init(kDefaultLayerDims, net_seed);
    const auto serial = evaluate_policy_serial(net, config, sut, 64, 500);
    const auto parallel = evaluate_policy_parallel(net, config, sut, 64, 500);
    EXPECT_EQ(serial, parallel);
  }
}

TEST(Evaluation, EpisodeSeedsDeriveFromEvaluationSeed) {
  const ExperimentConfig config;
  const auto recs = evaluate_policy_serial(mlp_init(kDefaultLayerDims, 4),
                                           config, ReferenceCas{}, 5, 77);
  ASSERT_EQ(recs.size(), 5u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].episode_id, static_cast<std::int64_t>(i));
    EXPECT_EQ(recs[i].episode_seed, derive_seed(77, i));
  }
}

TEST(Evaluation, GreedyPolicyIsTheNetworkArgmax) {
  Mlp net(kDefaultLayerDims);
  net.bias(2, 12) = 1.0;
  EXPECT_EQ(greedy_policy_action(net, AgentState{-3.0, 20.0}).index(), 12);
}

// Random action sequences survive a log round trip and replay bit for bit.
TEST(ReplayProperties, RandomEpisodesReplayExactly) {
  const ExperimentConfig config;
  const ReferenceCas sut;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> any(0, kNumActions - 1);
  for (int ep = 0; ep < 60; ++ep) {
    const int slow = any(rng) % 14;
    const bool mixed = ep % 2 == 0;
    const EpisodeRecord rec = run_episode(
        config, sut, ep, derive_seed(9, ep),
        [&](const AgentState&, int) { return PedAction(mixed ? any(rng) : slow); });
    const EpisodeRecord logged = episode_from_json(
        nlohmann::json::parse(to_json(rec).dump()));
    const ReplayResult r = replay_episode(logged, config, sut);
    EXPECT_TRUE(r.match) << "episode " << ep;
    EXPECT_EQ(r.first_divergent_step, -1);
    EXPECT_EQ(r.replayed, rec);
  }
}

TEST(Replay, TamperedTraceDiverges) {
  const ExperimentConfig config;
  const ReferenceCas sut;
  EpisodeRecord rec = run_episode(config, sut, 0, 123,
                                  [](const AgentState&, int) { return PedAction(9); });
  ASSERT_GT(rec.timesteps.size(), 10u);
  rec.timesteps[10].ego_speed += 1e-12;
  const ReplayResult r = replay_episode(rec, config, sut);
  EXPECT_FALSE(r.match);
  EXPECT_EQ(r.first_divergent_step, 10);
}

}  // namespace
}  // namespace edge_forge

#include "edge_forge/validation.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "edge_forge/errors.h"

namespace edge_forge {
namespace {

TimestepRecord ts(TimestepClass c, bool in_roi = true, int reward = 0) {
  TimestepRecord r;
  r.classification = c;
  r.in_roi = in_roi;
  r.reward = reward;
  return r;
}

// Episode with `n` timesteps of which the first `failures` are failures.
EpisodeRecord episode(std::int64_t id, int n, int failures) {
  EpisodeRecord e;
  e.episode_id = id;
  for (int i = 0; i < n; ++i) {
    e.timesteps.push_back(
        ts(i < failures ? TimestepClass::FailureTs : TimestepClass::SuccessTs));
  }
  finalize_episode(e, ValidationConfig{});
  return e;
}

EpisodeRecord with_reward(std::int64_t id, int total) {
  EpisodeRecord e = episode(id, 1, 0);
  e.total_reward = total;
  return e;
}

TEST(ClassifyTimestep, Examples) {
  EXPECT_EQ(classify_timestep(5.0, 20.375, true, false),
            TimestepClass::FailureTs);
  EXPECT_EQ(classify_timestep(7.0, 7.0, true, false), TimestepClass::SuccessTs);
  EXPECT_EQ(classify_timestep(1.0, 20.0, false, false),
            TimestepClass::SuccessTs);
  EXPECT_EQ(classify_timestep(0.1, 20.0, true, true), TimestepClass::SuccessTs);
}

TEST(ClassifyEpisode, ThresholdIsStrict) {
  EXPECT_EQ(episode(0, 40, 0).outcome, Outcome::SuccessScenario);
  EXPECT_EQ(episode(0, 40, 0).success_fraction, 1.0);
  const EpisodeRecord boundary = episode(0, 40, 10);
  EXPECT_EQ(boundary.success_fraction, 0.75);
  EXPECT_EQ(boundary.outcome, Outcome::FailureScenario);
  const EpisodeRecord one_failure = episode(0, 55, 1);
  EXPECT_NEAR(one_failure.success_fraction, 54.0 / 55.0, 1e-15);
  EXPECT_EQ(one_failure.outcome, Outcome::SuccessScenario);
}

TEST(ClassifyEpisode, EmptyEpisodeIsUsageError) {
  EXPECT_THROW(classify_episode(EpisodeRecord{}), UsageError);
}

TEST(ClassifyEpisode, RoiOnlyBasisIgnoresOutOfRoiSteps) {
  std::vector<TimestepRecord> steps;
  for (int i = 0; i < 30; ++i) steps.push_back(ts(TimestepClass::SuccessTs, false));
  for (int i = 0; i < 4; ++i) steps.push_back(ts(TimestepClass::FailureTs));
  for (int i = 0; i < 6; ++i) steps.push_back(ts(TimestepClass::SuccessTs));
  EXPECT_NEAR(success_fraction(steps, FractionBasis::AllTimesteps), 0.9, 1e-15);
  EXPECT_NEAR(success_fraction(steps, FractionBasis::RoiOnly), 0.6, 1e-15);
  EpisodeRecord e;
  e.timesteps = steps;
  EXPECT_EQ(classify_episode(e, 0.75, FractionBasis::AllTimesteps),
            Outcome::SuccessScenario);
  EXPECT_EQ(classify_episode(e, 0.75, FractionBasis::RoiOnly),
            Outcome::FailureScenario);
}

TEST(SuccessProbability, Examples) {
  EXPECT_EQ(format_probability(success_probability(7277, 10000)), "0.7277");
  EXPECT_EQ(success_probability(7277, 10000), 0.7277);
  EXPECT_EQ(format_probability(success_probability(1, 3)), "0.3333");
  std::vector<EpisodeRecord> all_ok = {episode(0, 40, 0), episode(1, 40, 0)};
  EXPECT_EQ(success_probability(all_ok), 1.0);
  EXPECT_THROW(success_probability(std::span<const EpisodeRecord>{}),
               UsageError);
  EXPECT_THROW(success_probability(0, 0), UsageError);
}

TEST(RewardCurve, Examples) {
  std::vector<EpisodeRecord> constant;
  for (int i = 0; i < 150; ++i) constant.push_back(with_reward(i, 6));
  for (double v : reward_curve(constant, 100)) EXPECT_EQ(v, 6.0);

  std::vector<EpisodeRecord> raw;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> r(-40, 40);
  for (int i = 0; i < 50; ++i) raw.push_back(with_reward(i, r(rng)));
  const auto unit = reward_curve(raw, 1);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(unit[i], raw[i].total_reward);

  std::vector<EpisodeRecord> step;
  for (int i = 0; i < 100; ++i) step.push_back(with_reward(i, 0));
  for (int i = 100; i < 200; ++i) step.push_back(with_reward(i, 10));
  const auto curve = reward_curve(step, 100);
  EXPECT_EQ(curve[199], 10.0);
  EXPECT_EQ(curve[149], 5.0);
}

TEST(RewardCurve, PrefixAveragesOverAvailableEpisodes) {
  const std::vector<double> values = {4, 8, 0, 12};
  const auto avg = moving_average(values, 3);
  EXPECT_EQ(avg, (std::vector<double>{4, 6, 4, 20.0 / 3.0}));
  EXPECT_THROW(moving_average(values, 0), UsageError);
}

TEST(EdgeCases, TieBreakAndTruncation) {
  std::vector<EpisodeRecord> recs = {with_reward(0, 3), with_reward(1, 9),
                                     with_reward(2, 9)};
  const auto top = extract_edge_cases(recs, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].episode_id, 1);
  const auto all = extract_edge_cases(recs, 10);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].episode_id, 1);
  EXPECT_EQ(all[1].episode_id, 2);
  EXPECT_EQ(all[2].episode_id, 0);
  EXPECT_FALSE(all[0].timesteps.empty());
  EXPECT_THROW(extract_edge_cases(recs, 0), UsageError);
}

TEST(Convergence, Examples) {
  const std::vector<double> flat(300, 4.0);
  EXPECT_EQ(convergence_episode(flat, 0.0, 200), 0u);

  std::vector<double> rising(1000);
  for (std::size_t i = 0; i < rising.size(); ++i) rising[i] = i * i;
  EXPECT_FALSE(convergence_episode(rising, 100.0, 200).has_value());

  // Linear ramp to 20 over 500 episodes, then flat with +-0.05 noise.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> settling(1200);
  for (std::size_t i = 0; i < settling.size(); ++i) {
    settling[i] = (i < 500 ? 20.0 * i / 500.0 : 20.0) + noise(rng);
  }
  const auto idx = convergence_episode(settling, 0.5, 200);
  ASSERT_TRUE(idx.has_value());
  EXPECT_LE(*idx, 520u);
  EXPECT_GE(*idx, 480u);

  EXPECT_FALSE(convergence_episode(flat, 1.0, 301).has_value());
  EXPECT_THROW(convergence_episode(flat, 1.0, 1), UsageError);
}

TEST(Report, CountsCurvesAndJson) {
  std::vector<EpisodeRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(episode(i, 40, i % 3 == 0 ? 20 : 0));
  const ValidationReport report = build_report(recs, ValidationConfig{});
  EXPECT_EQ(report.total_episodes, 10);
  EXPECT_EQ(report.failure_count, 4);
  EXPECT_EQ(report.success_count, 6);
  EXPECT_EQ(report.p_r, 0.6);
  EXPECT_EQ(report.cumulative_failures.back(), 4);
  EXPECT_EQ(report.reward_moving_average.size(), 10u);
  EXPECT_EQ(report.edge_cases.size(), 5u);
  const auto doc = to_json(report);
  EXPECT_EQ(doc.at("p_r_rounded").get<std::string>(), "0.6000");
  EXPECT_THROW(build_report(std::span<const EpisodeRecord>{}, ValidationConfig{}),
               UsageError);
}

TEST(Report, CsvHasOneRowPerEpisode) {
  std::vector<EpisodeRecord> recs;
  for (int i = 0; i < 7; ++i) recs.push_back(episode(i, 40, 15));
  const ValidationReport report = build_report(recs, ValidationConfig{});
  const std::string csv = cumulative_failures_csv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);  // header + rows
  EXPECT_NE(csv.find("6,7\n"), std::string::npos);
  EXPECT_NE(cumulative_failures_svg(report).find("<svg"), std::string::npos);
  EXPECT_NE(episode_trace_svg(recs[0]).find("</svg>"), std::string::npos);
}

TEST(EpisodeJson, RoundTripIsExact) {
  EpisodeRecord e;
  e.episode_id = 42;
  e.episode_seed = 0xfedcba9876543210ULL;
  e.term_reason = TermReason::Collision;
  TimestepRecord r;
  r.step = 1;
  r.t = 0.1;
  r.action = 13;
  r.ego_x = 0.8000000000000000444;
  r.ego_speed = 7.9123456789012345;
  r.ped_x = 30.0;
  r.ped_y = -6.675;
  r.ped_speed = 3.25;
  r.d_eucl = 30.05;
  r.d_rss = 14.37;
  r.in_roi = true;
  r.collided = true;
  r.reward = 0;
  e.timesteps = {r, r};
  finalize_episode(e, ValidationConfig{});
  EXPECT_EQ(episode_from_json(to_json(e)), e);
  EXPECT_EQ(episode_from_json(nlohmann::json::parse(to_json(e).dump())), e);
}

// Randomized episodes: partition, probability identity and curve shape.
TEST(ValidationProperties, PartitionAndCumulativeShape) {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> len(1, 80);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EpisodeRecord> recs;
    const int n = 1 + trial * 3;
    for (int i = 0; i < n; ++i) {
      const int l = len(rng);
      recs.push_back(episode(i, l, std::uniform_int_distribution<int>(0, l)(rng)));
    }
    const ValidationReport report = build_report(recs, ValidationConfig{});
    EXPECT_EQ(report.success_count + report.failure_count, n);
    EXPECT_GE(report.p_r, 0.0);
    EXPECT_LE(report.p_r, 1.0);
    EXPECT_NEAR(report.p_r,
                1.0 - static_cast<double>(report.failure_count) / n, 1e-15);
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const std::int64_t step = report.cumulative_failures[i] - prev;
      EXPECT_EQ(step, recs[i].outcome == Outcome::FailureScenario ? 1 : 0);
      prev = report.cumulative_failures[i];
    }
  }
}

TEST(ValidationProperties, AddingSuccessStepNeverFlipsToFailure) {
  std::mt19937_64 rng(161);
  std::uniform_int_distribution<int> len(1, 60);
  std::uniform_int_distribution<int> pos(0, 1000);
  for (int trial = 0; trial < 2000; ++trial) {
    const int l = len(rng);
    EpisodeRecord e = episode(trial, l, std::uniform_int_distribution<int>(0, l)(rng));
    const Outcome before = classify_episode(e);
    e.timesteps.insert(e.timesteps.begin() + pos(rng) % (l + 1),
                       ts(TimestepClass::SuccessTs));
    if (before == Outcome::SuccessScenario) {
      EXPECT_EQ(classify_episode(e), Outcome::SuccessScenario);
    }
  }
}

}  // namespace
}  // namespace edge_forge

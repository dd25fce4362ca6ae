#include "edge_forge/rss.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "edge_forge/errors.h"
#include "oracles.h"

namespace edge_forge {
namespace {

RssParams params_of(const testing::RssVector& v) {
  return RssParams{v.rho, v.a_accel, v.a_min_brake, v.a_max_brake};
}

TEST(SafeDistance, HandEvaluatedExamples) {
  const RssParams zero_accel{0.5, 0.0, 4.0, 8.0};
  EXPECT_EQ(safe_longitudinal_distance(0.0, 0.0, zero_accel), 0.0);
  EXPECT_DOUBLE_EQ(safe_longitudinal_distance(10.0, 0.0, RssParams{}), 20.375);
  EXPECT_EQ(safe_longitudinal_distance(0.0, 10.0, zero_accel), 0.0);
}

TEST(SafeDistance, MatchesTermByTermOracle) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> speed(0.0, 20.0);
  std::uniform_real_distribution<double> positive(0.1, 10.0);
  std::uniform_real_distribution<double> accel(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const testing::RssVector v{speed(rng),    speed(rng),   positive(rng),
                               accel(rng),    positive(rng), positive(rng)};
    const double expected = testing::rss_term_by_term(v);
    const double got = safe_longitudinal_distance(v.v_r, v.v_f, params_of(v));
    if (expected == 0.0) {
      EXPECT_EQ(got, 0.0);
    } else {
      EXPECT_NEAR(got, expected, 1e-12 * expected);
    }
  }
}

TEST(SafeDistance, RejectsBadSpeeds) {
  const RssParams p;
  EXPECT_THROW(safe_longitudinal_distance(-0.1, 0.0, p), DomainError);
  EXPECT_THROW(safe_longitudinal_distance(0.0, -1.0, p), DomainError);
  EXPECT_THROW(safe_longitudinal_distance(std::nan(""), 0.0, p), DomainError);
  EXPECT_THROW(
      safe_longitudinal_distance(std::numeric_limits<double>::infinity(), 0.0,
                                 p),
      DomainError);
}

TEST(SafeDistance, RejectsBadParams) {
  EXPECT_THROW(safe_longitudinal_distance(1.0, 0.0, RssParams{0.0, 2, 4, 8}),
               ConfigError);
  EXPECT_THROW(safe_longitudinal_distance(1.0, 0.0, RssParams{0.5, -1, 4, 8}),
               ConfigError);
  EXPECT_THROW(safe_longitudinal_distance(1.0, 0.0, RssParams{0.5, 2, 0, 8}),
               ConfigError);
  EXPECT_NO_THROW(safe_longitudinal_distance(1.0, 0.0, RssParams{0.5, 0, 4, 8}));
}

TEST(SafeDistanceProperties, MonotoneClampedSuperlinear) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> speed(0.0, 25.0);
  std::uniform_real_distribution<double> positive(0.05, 8.0);
  std::uniform_real_distribution<double> nonneg(0.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const RssParams p{positive(rng), nonneg(rng), positive(rng), positive(rng)};
    const double v_r = speed(rng);
    const double v_f = speed(rng);
    const double dv = speed(rng) * 0.1;
    const double d = safe_longitudinal_distance(v_r, v_f, p);
    EXPECT_GE(d, 0.0);
    EXPECT_GE(safe_longitudinal_distance(v_r + dv, v_f, p), d);
    EXPECT_LE(safe_longitudinal_distance(v_r, v_f + dv, p), d);
    // The response-time acceleration adds a speed-independent offset, so
    // doubling is strictly superlinear only once it is switched off.
    const RssParams no_accel{p.rho, 0.0, p.a_min_brake, p.a_max_brake};
    if (v_r > 0.0) {
      EXPECT_GT(safe_longitudinal_distance(2.0 * v_r, 0.0, no_accel),
                2.0 * safe_longitudinal_distance(v_r, 0.0, no_accel));
    }
  }
}

TEST(SafeDistanceProperties, VanishingResponseLimitIsBrakingGap) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> speed(0.0, 25.0);
  std::uniform_real_distribution<double> positive(0.5, 8.0);
  for (int i = 0; i < 500; ++i) {
    const double v_r = speed(rng);
    const double v_f = speed(rng);
    const double b_min = positive(rng);
    const double b_max = positive(rng);
    const double limit = std::max(
        0.0, v_r * v_r / (2.0 * b_min) - v_f * v_f / (2.0 * b_max));
    const RssParams p{1e-9, 0.0, b_min, b_max};
    EXPECT_NEAR(safe_longitudinal_distance(v_r, v_f, p), limit, 1e-6);
  }
}

TEST(SafeDistance, DoublingDefaultSpeedMoreThanDoubles) {
  const RssParams p;
  for (double v = 2.0; v <= 30.0; v += 0.5) {
    EXPECT_GT(safe_longitudinal_distance(2.0 * v, 0.0, p),
              2.0 * safe_longitudinal_distance(v, 0.0, p));
  }
}

TEST(IsDangerous, StrictComparison) {
  EXPECT_TRUE(is_dangerous(5.0, 20.375));
  EXPECT_FALSE(is_dangerous(20.375, 20.375));
  EXPECT_FALSE(is_dangerous(0.0, 0.0));
  EXPECT_FALSE(is_dangerous(3.0, 0.0));
}

SimState pedestrian_ahead(double dx, double dy, double ego_speed) {
  SimState s;
  s.ego_speed = ego_speed;
  s.ego_cruise_speed = ego_speed;
  s.ped_x = dx;
  s.ped_y = dy;
  return s;
}

TEST(Reward, Examples) {
  const WorldConfig world;
  const RssParams rss;
  const RewardValue far = compute_reward(pedestrian_ahead(20, 0, 10), world, rss);
  EXPECT_EQ(far.value, 0);
  EXPECT_EQ(far.cause, RewardCause::OutOfRoiOrCollision);

  const RewardValue unsafe =
      compute_reward(pedestrian_ahead(5, 0, 10), world, rss);
  EXPECT_EQ(unsafe.value, 2);
  EXPECT_EQ(unsafe.cause, RewardCause::UnsafeDistance);

  const RewardValue safe =
      compute_reward(pedestrian_ahead(5, 0, 0), world, rss);
  EXPECT_EQ(safe.value, -2);
  EXPECT_EQ(safe.cause, RewardCause::SafeDistance);

  SimState crashed = pedestrian_ahead(0.2, 0, 10);
  crashed.terminated = true;
  crashed.term_reason = TermReason::Collision;
  EXPECT_EQ(compute_reward(crashed, world, rss).value, 0);
}

TEST(RewardProperties, CodomainAndCauseAgree) {
  const WorldConfig world;
  const RssParams rss;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dx(-5.0, 15.0);
  std::uniform_real_distribution<double> dy(-4.0, 4.0);
  std::uniform_real_distribution<double> v(0.0, 12.0);
  std::bernoulli_distribution crash(0.1);
  for (int i = 0; i < 5000; ++i) {
    SimState s = pedestrian_ahead(dx(rng), dy(rng), v(rng));
    if (crash(rng)) {
      s.terminated = true;
      s.term_reason = TermReason::Collision;
    }
    const RewardValue r = compute_reward(s, world, rss);
    ASSERT_TRUE(r.value == 2 || r.value == -2 || r.value == 0);
    EXPECT_EQ(r.value == 2, r.cause == RewardCause::UnsafeDistance);
    EXPECT_EQ(r.value == -2, r.cause == RewardCause::SafeDistance);
    EXPECT_EQ(r.value == 0, r.cause == RewardCause::OutOfRoiOrCollision);
    if (!in_detection_region(s, world)) EXPECT_EQ(r.value, 0);
  }
}

}  // namespace
}  // namespace edge_forge

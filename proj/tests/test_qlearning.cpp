#include <gtest/gtest.h>

#include <cmath>

#include "aquactl/error.hpp"
#include "aquactl/qlearning.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aquactl;

namespace {

double sup_error(const QTable& q, const std::vector<std::vector<double>>& truth) {
  double e = 0;
  for (std::size_t s = 0; s < truth.size(); ++s)
    for (std::size_t a = 0; a < truth[s].size(); ++a) e = std::max(e, std::abs(q(s, a) - truth[s][a]));
  return e;
}

}  // namespace

TEST(QUpdate, HandComputedHalfStep) {
  QTable q(2, 2);
  q_update(q, 0, 1, 1.0, 1, false, 0.5, 0.9);
  EXPECT_EQ(q(0, 1), 0.5);
  EXPECT_EQ(q.visits(0, 1), 1);
}

TEST(QUpdate, BootstrapsFromNextStateMax) {
  QTable q(2, 2);
  q(1, 0) = 2.0;
  q(1, 1) = 4.0;
  q(0, 0) = 1.0;
  q_update(q, 0, 0, 0.5, 1, false, 0.25, 0.9);
  EXPECT_NEAR(q(0, 0), 1.0 + 0.25 * (0.5 + 0.9 * 4.0 - 1.0), 1e-15);
}

TEST(QUpdate, ZeroAlphaLeavesValue) {
  QTable q(2, 2);
  q(0, 0) = 3.0;
  q_update(q, 0, 0, 7.0, 1, false, 0.0, 0.9);
  EXPECT_EQ(q(0, 0), 3.0);
}

TEST(QUpdate, TerminalFullReplacement) {
  QTable q(2, 2);
  q(1, 0) = 100.0;
  q(0, 0) = -4.0;
  q_update(q, 0, 0, 2.5, 1, true, 1.0, 0.9);
  EXPECT_EQ(q(0, 0), 2.5);
}

TEST(Epsilon, ClampedAtZero) {
  QLearningConfig c;
  c.variant = EpsilonVariant::clamped;
  c.eps0 = 0.9;
  EXPECT_NEAR(epsilon(0, c), 0.1, 1e-15);
  EXPECT_NEAR(exploration_probability(0, c), 0.9, 1e-15);
  // Clamped once eps0 exp(i / t_eps) exceeds one.
  EXPECT_EQ(epsilon(1000, c), 0.0);
}

TEST(Epsilon, DecayingVariant) {
  QLearningConfig c;
  c.eps0 = 1.0;
  c.eps_min = 0.0;
  c.t_eps = 40;
  EXPECT_NEAR(epsilon(40, c), std::exp(-1.0), 1e-15);
  c.eps_min = 0.05;
  EXPECT_EQ(epsilon(1e6, c), 0.05);
  double prev = 2.0;
  for (int i = 0; i < 500; i += 7) {
    EXPECT_LE(epsilon(i, c), prev);
    prev = epsilon(i, c);
  }
}

TEST(QTable, GreedyTieGoesToLowestIndex) {
  QTable q(1, 4);
  q(0, 1) = 2.0;
  q(0, 3) = 2.0;
  EXPECT_EQ(q.greedy(0), 1u);
  EXPECT_EQ(QTable(1, 3).greedy(0), 0u);
}

TEST(ValueIteration, MatchesIndependentOracle) {
  const auto t = fixture::ring12();
  const auto mdp = fixture::make_mdp(t);
  const Eigen::MatrixXd q = value_iteration(mdp, 0.9);
  const auto truth = oracle::optimal_q(t.next, t.reward, t.terminal, 0.9);
  for (std::size_t s = 0; s < 12; ++s)
    for (std::size_t a = 0; a < 3; ++a)
      EXPECT_NEAR(q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)), truth[s][a], 1e-11);
}

TEST(Train, ChainReachesValueIteration) {
  const auto t = fixture::chain3();
  auto mdp = fixture::make_mdp(t);
  const auto res = train(mdp, fixture::oracle_training(0.9));
  EXPECT_TRUE(res.converged);
  EXPECT_LT(sup_error(res.table, oracle::optimal_q(t.next, t.reward, t.terminal, 0.9)), 1e-4);
  EXPECT_EQ(res.policy[0], 0u);
}

TEST(Train, SingleStateBanditPicksRewardingAction) {
  // One state that self-loops; action 1 pays 1, action 0 pays 0.
  FiniteMdp mdp({{0, 0}}, {{0.0, 1.0}}, {false}, 0, 5);
  QLearningConfig c;
  c.alpha = 1.0;
  c.gamma = 0.5;
  c.eps0 = 1.0;
  c.eps_min = 1.0;
  c.max_episodes = 3;
  const auto res = train(mdp, c);
  EXPECT_EQ(res.policy[0], 1u);
}

TEST(Train, DeterministicForSeed) {
  const auto t = fixture::ring12();
  auto a = fixture::make_mdp(t);
  auto b = fixture::make_mdp(t);
  QLearningConfig c = fixture::oracle_training(0.9);
  c.max_episodes = 200;
  EXPECT_EQ(train(a, c).table, train(b, c).table);
}

TEST(Train, RewardScalingKeepsGreedyPolicy) {
  auto t = fixture::ring12();
  auto a = fixture::make_mdp(t);
  for (auto& row : t.reward)
    for (auto& r : row) r *= 3.0;
  auto b = fixture::make_mdp(t);
  const auto cfg = fixture::oracle_training(0.9);
  EXPECT_EQ(train(a, cfg).policy, train(b, cfg).policy);
}

TEST(Train, ValuesStayBounded) {
  const auto t = fixture::ring12();
  auto mdp = fixture::make_mdp(t);
  QLearningConfig c = fixture::oracle_training(0.9);
  c.max_episodes = 500;
  const auto res = train(mdp, c);
  EXPECT_LE(res.table.values().cwiseAbs().maxCoeff(), 1.0 / (1.0 - 0.9) + 1.0);
}

TEST(Train, TraceFollowsAlgorithmPhases) {
  const auto t = fixture::chain3();
  auto mdp = fixture::make_mdp(t);
  QLearningConfig c = fixture::oracle_training(0.9);
  c.max_episodes = 3;
  c.value_tolerance = 1e-30;
  std::vector<std::string> phases;
  const auto res = train(mdp, c, [&](const TraceEvent& e) { phases.push_back(e.phase); });
  EXPECT_FALSE(res.converged);
  ASSERT_EQ(phases.size(), 1u + 3u * 3u + 1u);
  EXPECT_EQ(phases.front(), "initialize");
  EXPECT_EQ(phases[1], "episode");
  EXPECT_EQ(phases[2], "update");
  EXPECT_EQ(phases[3], "improve");
  EXPECT_EQ(phases.back(), "stop");
}

TEST(GrowthMdp, RewardFormula) {
  MdpSpec spec;
  spec.feed_cost = 0.1;
  spec.target = 1000;
  GrowthParams p;
  EXPECT_EQ(growth_reward(100.0, 0.0, 100.0, spec, p), 0.0);
  EXPECT_NEAR(growth_reward(100.0, 0.5, 102.0, spec, p), 1.5, 1e-12);
  EXPECT_NEAR(growth_reward(999.0, 0.0, 1001.0, spec, p), 2.0 + spec.bonus, 1e-12);
}

TEST(GrowthMdp, LogBinsCoverRange) {
  WeightGrid g{1.0, 1000.0, 3};
  EXPECT_EQ(g.bin(0.5), 0u);
  EXPECT_EQ(g.bin(5.0), 0u);
  EXPECT_EQ(g.bin(50.0), 1u);
  EXPECT_EQ(g.bin(500.0), 2u);
  EXPECT_EQ(g.bin(5000.0), 2u);
}

TEST(GrowthMdp, EpisodeEndsAtHorizonOrTarget) {
  SimConfig sim;
  sim.env = EnvProfile::constant({30, 5, 0.0, 1});
  MdpSpec spec;
  spec.horizon = 10;
  spec.target = 1e4;
  GrowthMdp mdp(spec, sim);
  EXPECT_EQ(mdp.max_steps(), 10u);
  Rng rng(1);
  mdp.reset(rng);
  const auto tr = mdp.step(spec.f_levels.size() - 1);
  EXPECT_FALSE(tr.terminal);
  EXPECT_GT(mdp.weight(), spec.w0);

  spec.target = 50.5;
  GrowthMdp close(spec, sim);
  close.reset(rng);
  EXPECT_TRUE(close.step(spec.f_levels.size() - 1).terminal);
}

TEST(QLearningConfig, ValidationKeys) {
  QLearningConfig c;
  c.gamma = 1.0;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "controller.qlearning.gamma");
  }
}

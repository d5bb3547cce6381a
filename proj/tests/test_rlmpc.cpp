#include <gtest/gtest.h>

#include <random>

#include "aquactl/error.hpp"
#include "aquactl/rlmpc.hpp"

using namespace aquactl;

namespace {

SimConfig sim30() {
  SimConfig c;
  c.tf = 30;
  c.env = EnvProfile::constant({29.0, 5.0, 0.02, 1.0});
  c.initial = Individual{40.0};
  return c;
}

RlMpcConfig hybrid_cfg() {
  RlMpcConfig c;
  c.mpc.bounds.lower = Eigen::Vector3d(0.0, 24.0, 1.0);
  c.mpc.bounds.upper = Eigen::Vector3d(1.0, 33.0, 8.0);
  c.mpc.seed = 17;
  c.q.alpha = 0.3;
  c.q.seed = 5;
  c.grid = {1.0, 1000.0, 32};
  return c;
}

struct HybridRun {
  Trajectory traj;
  MpcModel model;
};

HybridRun run_hybrid(const RlMpcConfig& cfg, int episodes = 1) {
  const SimConfig sim = sim30();
  const Reference ref = Reference::from_trajectory(reference_trajectory(sim, 0.6));
  MpcModel model = MpcModel::from(sim, ref);
  RlMpcController c(cfg, model);
  Trajectory traj;
  for (int e = 0; e < episodes; ++e) traj = simulate(sim, c, &ref);
  return {traj, model};
}

}  // namespace

TEST(HybridDiscount, Ratio) {
  EXPECT_EQ(hybrid_discount(10, 10), 0.0);
  EXPECT_EQ(hybrid_discount(1, 1), 0.0);
  EXPECT_NEAR(hybrid_discount(1, 10), 0.9, 1e-15);
  EXPECT_THROW(hybrid_discount(4, 3), std::invalid_argument);
  EXPECT_THROW(hybrid_discount(0, 3), std::invalid_argument);
}

TEST(HybridDiscount, RandomPairsExact) {
  std::mt19937 rng(8);
  for (int i = 0; i < 100; ++i) {
    const int N = std::uniform_int_distribution<int>(1, 60)(rng);
    const int M = std::uniform_int_distribution<int>(1, N)(rng);
    EXPECT_EQ(hybrid_discount(M, N), 1.0 - double(M) / double(N));
    RlMpcConfig c;
    c.mpc.N = N;
    c.mpc.M = M;
    EXPECT_EQ(c.gamma(), hybrid_discount(M, N));
  }
}

TEST(HybridReward, SignConvention) {
  EXPECT_EQ(hybrid_reward(5.0, 5.0), 0.0);
  EXPECT_EQ(hybrid_reward(10.0, 7.0), 3.0);
  MpcSolution a, b;
  a.J = 10;
  a.feasible = true;
  b.J = 7;
  b.feasible = false;
  EXPECT_FALSE(hybrid_reward(a, b).has_value());
  b.feasible = true;
  EXPECT_EQ(*hybrid_reward(a, b), 3.0);
}

TEST(ActionLattice, IndexRoundTrip) {
  ActionLattice l;
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_EQ(l.nearest(l.at(i)), i);
  EXPECT_EQ(l.at(l.nearest({0.6, 32.0, 7.9})), (ControlAction{0.5, 33.0, 8.0}));
}

TEST(RlMpc, TelescopingReturn) {
  const HybridRun r = run_hybrid(hybrid_cfg());
  const auto& recs = r.traj.records;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    ASSERT_TRUE(recs[k].reward.has_value()) << "step " << k;
    sum += *recs[k].reward;
  }
  ASSERT_TRUE(recs.front().J && recs.back().J);
  EXPECT_NEAR(sum, *recs.front().J - *recs.back().J, 1e-9);
}

TEST(RlMpc, EveryActionPassesAudit) {
  RlMpcConfig cfg = hybrid_cfg();
  cfg.guide0 = 0.5;
  cfg.guide_min = 0.3;
  const HybridRun r = run_hybrid(cfg, 3);
  const AuditResult audit = audit_constraints(r.traj, cfg.mpc, r.model);
  EXPECT_EQ(audit.checked, 30);
  EXPECT_TRUE(audit.ok());
  bool saw_q = false;
  for (const auto& rec : r.traj.records) saw_q = saw_q || rec.chosen_by == "q";
  EXPECT_TRUE(saw_q);
}

TEST(RlMpc, MatchesMpcWithoutExplorationOrLearning) {
  RlMpcConfig cfg = hybrid_cfg();
  cfg.guide0 = 0.0;
  cfg.guide_min = 0.0;
  cfg.q.alpha = 0.0;
  const HybridRun hybrid = run_hybrid(cfg);

  const SimConfig sim = sim30();
  const Reference ref = Reference::from_trajectory(reference_trajectory(sim, 0.6));
  MpcController mpc(cfg.mpc, MpcModel::from(sim, ref));
  const Trajectory plain = simulate(sim, mpc, &ref);
  ASSERT_EQ(plain.records.size(), hybrid.traj.records.size());
  for (std::size_t k = 0; k < plain.records.size(); ++k) {
    EXPECT_EQ(plain.records[k].state, hybrid.traj.records[k].state);
    EXPECT_EQ(plain.records[k].action, hybrid.traj.records[k].action);
  }
}

TEST(RlMpc, FullGuidanceIsPlainMpc) {
  RlMpcConfig cfg = hybrid_cfg();
  cfg.guide0 = 1.0;
  cfg.guide_min = 1.0;
  const HybridRun hybrid = run_hybrid(cfg);
  for (std::size_t k = 0; k + 1 < hybrid.traj.records.size(); ++k)
    EXPECT_EQ(hybrid.traj.records[k].chosen_by, "mpc");
}

TEST(RlMpc, ZeroDiscountIsRunningAverage) {
  RlMpcConfig cfg = hybrid_cfg();
  cfg.mpc.N = 3;
  cfg.mpc.M = 3;
  cfg.guide0 = 1.0;
  cfg.guide_min = 1.0;
  const SimConfig sim = sim30();
  const Reference ref = Reference::from_trajectory(reference_trajectory(sim, 0.6));
  RlMpcController c(cfg, MpcModel::from(sim, ref));
  ASSERT_EQ(cfg.gamma(), 0.0);
  const Trajectory traj = simulate(sim, c, &ref);

  // Replay the updates by hand: Q <- Q + alpha (r - Q).
  QTable q(32, cfg.lattice.size());
  for (std::size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& rec = traj.records[k];
    const std::size_t s = cfg.grid.bin(observed_weight(rec.state));
    const std::size_t a = cfg.lattice.nearest(*rec.action);
    q(s, a) = q(s, a) + cfg.q.alpha * (*rec.reward - q(s, a));
  }
  EXPECT_TRUE(q.values().isApprox(c.table().values(), 1e-14) ||
              (q.values() - c.table().values()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST(RlMpcConfig, LatticeMustSitInsideBounds) {
  RlMpcConfig cfg = hybrid_cfg();
  cfg.lattice.T = {35.0};
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "controller.rlmpc.T_levels");
  }
}

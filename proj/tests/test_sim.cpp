#include <gtest/gtest.h>

#include <cmath>

#include "aquactl/error.hpp"
#include "aquactl/sim.hpp"
#include "oracles.hpp"

using namespace aquactl;

namespace {

SimConfig constant_run(double days, double dt, Integrator integrator = Integrator::rk4) {
  SimConfig c;
  c.t0 = 0;
  c.tf = days;
  c.dt = dt;
  c.integrator = integrator;
  c.env = EnvProfile::constant({30.0, 6.0, 0.01, 1.0});
  c.initial = Individual{20.0};
  return c;
}

class FeedAbove : public Controller {
 public:
  explicit FeedAbove(std::size_t bad_step) : bad_(bad_step) {}
  std::string name() const override { return "bad"; }
  Decision act(const Observation& obs) override {
    Decision d;
    d.action = {obs.step == bad_ ? 1.5 : 0.5, 30.0, 6.0};
    return d;
  }

 private:
  std::size_t bad_;
};

}  // namespace

TEST(Profile, ConstantAndOverride) {
  const auto p = EnvProfile::constant({28.0, 4.0, 0.05, 1.0});
  EXPECT_EQ(p.at(12.3).T, 28.0);
  EXPECT_EQ(p.with_override(Channel::DO, 9.0).at(0).DO, 9.0);
}

TEST(Profile, SinusoidalChannel) {
  const auto p = EnvProfile::sinusoidal({30, 2, 20, 0}, {5, 0, 1, 0}, {0.02, 0, 1, 0}, {1, 0, 1, 0});
  EXPECT_NEAR(p.at(5.0).T, 32.0, 1e-12);
  EXPECT_NEAR(p.at(15.0).T, 28.0, 1e-12);
}

TEST(Profile, TableInterpolatesAndHoldsEnds) {
  const auto p = EnvProfile::table({{0.0, {20, 4, 0.0, 1}}, {10.0, {30, 6, 0.1, 1}}});
  EXPECT_NEAR(p.at(5.0).T, 25.0, 1e-12);
  EXPECT_NEAR(p.at(2.5).UIA, 0.025, 1e-12);
  EXPECT_EQ(p.at(-3.0).T, 20.0);
  EXPECT_EQ(p.at(99.0).DO, 6.0);
  EXPECT_THROW(EnvProfile::table({{1.0, {}}, {1.0, {}}}), std::invalid_argument);
}

TEST(Profile, NoiseIsDailyAndDeterministic) {
  auto p = EnvProfile::constant({30, 5, 0.02, 1});
  p.with_noise(Channel::T, 1.0).with_noise_seed(99);
  EXPECT_EQ(p.at(3.1).T, p.at(3.9).T);
  EXPECT_NE(p.at(3.1).T, p.at(4.1).T);
  auto q = EnvProfile::constant({30, 5, 0.02, 1});
  q.with_noise(Channel::T, 1.0).with_noise_seed(99);
  EXPECT_EQ(p.at(17.0).T, q.at(17.0).T);
}

TEST(Profile, ClampsPhysicalRanges) {
  auto p = EnvProfile::constant({30, -1, -0.5, 5});
  const auto e = p.at(0);
  EXPECT_EQ(e.DO, 0.0);
  EXPECT_EQ(e.UIA, 0.0);
  EXPECT_LT(e.rho, 2.0);
}

TEST(SimConfig, RejectsFractionalStepCount) {
  SimConfig c = constant_run(10, 0.3);
  EXPECT_THROW(c.validate(), ConfigError);
  c.dt = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Simulate, RecordsEveryStep) {
  const SimConfig c = constant_run(10, 0.5);
  ConstantController hold(0.5);
  const Trajectory traj = simulate(c, hold);
  ASSERT_EQ(traj.records.size(), 21u);
  EXPECT_EQ(traj.records.back().t, 10.0);
  EXPECT_TRUE(traj.records.front().action.has_value());
  EXPECT_FALSE(traj.records.back().action.has_value());
  EXPECT_EQ(traj.records.front().action->T, 30.0);
}

TEST(Simulate, RhsMatchesOracleEulerStep) {
  const SimConfig c = constant_run(1, 1.0, Integrator::euler);
  ConstantController hold(0.5);
  const Trajectory traj = simulate(c, hold);
  const double expected =
      20.0 + static_cast<double>(oracle::dwdt(20.0L, 0.5L, 30.0L, 6.0L, 0.01L, 1.0L));
  EXPECT_NEAR(std::get<Individual>(traj.records.back().state).w, expected, 1e-12);
}

TEST(Simulate, InvalidActionReportsStep) {
  const SimConfig c = constant_run(10, 1.0);
  FeedAbove bad(4);
  try {
    simulate(c, bad);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& e) {
    EXPECT_EQ(e.step_index(), 4u);
  }
}

TEST(Simulate, Rk4ConvergesUnderStepHalving) {
  ConstantController hold(0.6);
  const double w1 = observed_weight(simulate(constant_run(30, 1.0), hold).records.back().state);
  const double w2 = observed_weight(simulate(constant_run(30, 0.5), hold).records.back().state);
  EXPECT_LT(std::abs(w1 - w2) / w2, 1e-6);
}

TEST(Simulate, EulerErrorIsFirstOrder) {
  ConstantController hold(0.6);
  const double truth =
      observed_weight(simulate(constant_run(30, 0.01), hold).records.back().state);
  auto err = [&](double dt) {
    const auto traj = simulate(constant_run(30, dt, Integrator::euler), hold);
    return std::abs(observed_weight(traj.records.back().state) - truth);
  };
  const double ratio = err(0.5) / err(0.25);
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Population, CountDropsByFloorOnWholeDays) {
  SimConfig c = constant_run(3, 0.5);
  c.initial = Population{1000.0 * 20.0, 1000};
  c.env = EnvProfile::constant({30, 6, 0.8, 1});
  ConstantController hold(0.5);
  const Trajectory traj = simulate(c, hold);
  const double k1 = mortality_k1(0.8, c.params);
  std::int64_t p = 1000;
  for (const auto& r : traj.records) {
    const auto& pop = std::get<Population>(r.state);
    EXPECT_EQ(pop.p, p) << "t=" << r.t;
    if (std::abs(r.t + 0.5 - std::round(r.t + 0.5)) < 1e-12 && r.t + 0.5 <= 3.0)
      p -= static_cast<std::int64_t>(std::floor(static_cast<double>(p) * k1));
  }
}

TEST(Population, DegeneratesToIndividual) {
  SimConfig ind = constant_run(60, 1.0);
  SimConfig pop = ind;
  pop.initial = Population{20.0, 1};
  pop.mortality = false;
  ConstantController hold(0.7);
  const auto a = simulate(ind, hold);
  const auto b = simulate(pop, hold);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const double wa = observed_weight(a.records[k].state);
    const double wb = observed_weight(b.records[k].state);
    EXPECT_LT(std::abs(wa - wb) / wa, 1e-12);
  }
}

TEST(Population, StockingRefillsEmptyPond) {
  SimConfig c = constant_run(2, 1.0);
  c.initial = Population{0.0, 0};
  c.stocking = {5, 2.0};
  c.mortality = false;
  ConstantController hold(0.5);
  const auto traj = simulate(c, hold);
  const auto& end = std::get<Population>(traj.records.back().state);
  EXPECT_EQ(end.p, 10);
  EXPECT_GT(end.xi, 0.0);
}

TEST(Reference, InterpolatesAndHolds) {
  const Reference r(0.0, 1.0, {10.0, 20.0, 40.0});
  EXPECT_EQ(r.at(0.0), 10.0);
  EXPECT_EQ(r.at(1.5), 30.0);
  EXPECT_EQ(r.at(7.0), 40.0);
}

TEST(Reference, IdealConditionsBeatAmbient) {
  const SimConfig c = constant_run(30, 1.0);
  const auto ref = reference_trajectory(c, 0.6);
  ConstantController hold(0.6);
  const auto amb = simulate(c, hold);
  EXPECT_GT(observed_weight(ref.records.back().state),
            observed_weight(amb.records.back().state));
  EXPECT_EQ(ref.records.front().action->T, c.params.T_opt);
}

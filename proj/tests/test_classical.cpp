#include <gtest/gtest.h>

#include "aquactl/classical.hpp"
#include "aquactl/error.hpp"

using namespace aquactl;

TEST(BangBangLaw, OnlyTheErrorSignMatters) {
  BangBangConfig cfg{30.0, 1.0, 0.0, 0.0};
  EXPECT_EQ(bang_bang(29.0, cfg), 1.0);
  EXPECT_EQ(bang_bang(31.0, cfg), 0.0);
  // Zero error is not positive.
  EXPECT_EQ(bang_bang(30.0, cfg), 0.0);
}

TEST(BangBangLaw, HysteresisHoldsInsideBand) {
  BangBang law(BangBangConfig{30.0, 1.0, 0.0, 2.0});
  EXPECT_EQ(law.update(28.0), 1.0);
  EXPECT_EQ(law.update(30.5), 1.0);  // inside the band: keeps on
  EXPECT_EQ(law.update(31.5), 0.0);
  EXPECT_EQ(law.update(29.5), 0.0);  // inside the band: keeps off
  EXPECT_EQ(law.update(28.9), 1.0);
}

TEST(BangBangLaw, RejectsEqualLevels) {
  EXPECT_THROW(BangBang(BangBangConfig{0.0, 1.0, 1.0, 0.0}), ConfigError);
}

TEST(Pid, ProportionalOnly) {
  PidConfig cfg;
  cfg.kp = 2.0;
  PidState st;
  EXPECT_DOUBLE_EQ(pid_step(1.5, 1.0, st, cfg), 3.0);
}

TEST(Pid, TrapezoidalIntegral) {
  PidConfig cfg;
  cfg.ki = 1.0;
  PidState st;
  EXPECT_DOUBLE_EQ(pid_step(2.0, 0.5, st, cfg), 0.5);         // 0.5 * (2 + 0) / 2
  EXPECT_DOUBLE_EQ(pid_step(2.0, 0.5, st, cfg), 0.5 + 1.0);   // + 0.5 * (2 + 2) / 2
}

TEST(Pid, BackwardDifferenceDerivative) {
  PidConfig cfg;
  cfg.kd = 1.0;
  PidState st;
  EXPECT_DOUBLE_EQ(pid_step(1.0, 0.5, st, cfg), 2.0);
  EXPECT_DOUBLE_EQ(pid_step(1.0, 0.5, st, cfg), 0.0);
}

TEST(Pid, FilteredDerivativeBlends) {
  PidConfig cfg;
  cfg.kd = 1.0;
  cfg.derivative_filter = true;
  cfg.filter_coeff = 0.5;
  PidState st;
  EXPECT_DOUBLE_EQ(pid_step(1.0, 1.0, st, cfg), 0.5);
}

TEST(Pid, AntiWindupHoldsIntegralWhenSaturated) {
  PidConfig cfg;
  cfg.kp = 0.1;
  cfg.ki = 1.0;
  cfg.u_min = -1.0;
  cfg.u_max = 1.0;
  PidState st;
  for (int i = 0; i < 50; ++i) EXPECT_LE(pid_step(5.0, 1.0, st, cfg), 1.0);
  EXPECT_LE(st.integral, 2.5 + 1e-12);
  // The held integral unwinds within two steps of a sign change.
  pid_step(-5.0, 1.0, st, cfg);
  EXPECT_LT(pid_step(-5.0, 1.0, st, cfg), 1.0);
}

TEST(Pid, IntegralClamp) {
  PidConfig cfg;
  cfg.ki = 1.0;
  cfg.integral_max = 3.0;
  PidState st;
  for (int i = 0; i < 10; ++i) pid_step(4.0, 1.0, st, cfg);
  EXPECT_EQ(st.integral, 3.0);
}

TEST(Pid, RejectsInvertedLimits) {
  PidConfig cfg;
  cfg.u_min = 1.0;
  cfg.u_max = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(LoopController, TemperatureLoopLiftsAmbient) {
  BangBangConfig cfg{32.0, 4.0, 0.0, 0.0};
  BangBangController c(cfg, LoopBinding{ControlChannel::temperature, 32.0, 0.5});
  Observation obs;
  obs.ambient = {29.0, 5.0, 0.0, 1.0};
  const auto d = c.act(obs);
  EXPECT_EQ(d.action.T, 33.0);
  EXPECT_EQ(d.action.f, 0.5);
  EXPECT_EQ(d.action.DO, 5.0);
}

TEST(LoopController, FeedLoopNeedsReference) {
  PidConfig cfg;
  cfg.kp = 0.1;
  cfg.u_min = 0;
  cfg.u_max = 1;
  PidController c(cfg, LoopBinding{ControlChannel::feed, 0.0, 0.5}, 1.0);
  Observation obs;
  obs.weight = 10.0;
  EXPECT_THROW(c.act(obs), std::logic_error);
  obs.w_ref = 15.0;
  EXPECT_DOUBLE_EQ(c.act(obs).action.f, 0.5);
}

TEST(Channels, RoundTripNames) {
  for (auto c : {ControlChannel::feed, ControlChannel::temperature, ControlChannel::oxygen})
    EXPECT_EQ(channel_from_string(to_string(c)), c);
  EXPECT_THROW(channel_from_string("salinity"), std::invalid_argument);
}

#pragma once

#include <limits>
#include <optional>
#include <string>

#include "aquactl/sim.hpp"

namespace aquactl {

struct BangBangConfig {
  double setpoint = 0.0;
  double on = 1.0;
  double off = 0.0;
  double deadband = 0.0;  ///< full band width around the setpoint

  void validate() const;
};

/// The literal on/off law: on iff setpoint - measurement > 0.
double bang_bang(double measurement, const BangBangConfig& cfg);

/// On/off switch with optional hysteresis. Inside the band the previous output
/// is held; with a zero band this is exactly bang_bang().
class BangBang {
 public:
  explicit BangBang(const BangBangConfig& cfg);
  double update(double measurement) { return update(measurement, cfg_.setpoint); }
  double update(double measurement, double setpoint);
  void reset() { on_.reset(); }
  const BangBangConfig& config() const { return cfg_; }

 private:
  BangBangConfig cfg_;
  std::optional<bool> on_;
};

struct PidConfig {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double u_min = -std::numeric_limits<double>::infinity();
  double u_max = std::numeric_limits<double>::infinity();
  double integral_min = -std::numeric_limits<double>::infinity();
  double integral_max = std::numeric_limits<double>::infinity();
  bool derivative_filter = false;
  double filter_coeff = 0.5;  ///< weight of the previous derivative when filtering

  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double derivative = 0.0;
};

/// Discrete PID: trapezoidal integral, backward-difference derivative on the
/// error, output clamp. The integral is held while the output is already
/// saturated in the direction the integral would push it.
double pid_step(double error, double dt, PidState& state, const PidConfig& cfg);

enum class ControlChannel { feed, temperature, oxygen };

std::string to_string(ControlChannel c);
ControlChannel channel_from_string(const std::string& s);

/// Which channel a feedback loop drives and what the other channels do.
///
/// feed: measures the observed weight against the reference weight and sets f
/// directly. temperature / oxygen: the actuator adds a lift to the ambient
/// value (heater, aerator); the sensor reads ambient plus the lift currently
/// applied. The remaining channels follow the ambient profile, with f held at
/// `feed`.
struct LoopBinding {
  ControlChannel channel = ControlChannel::feed;
  double setpoint = 0.0;  ///< ignored for the feed channel
  double feed = 0.5;
};

class BangBangController final : public Controller {
 public:
  BangBangController(const BangBangConfig& cfg, const LoopBinding& binding);
  std::string name() const override { return "bangbang"; }
  void reset() override;
  Decision act(const Observation& obs) override;

 private:
  BangBang law_;
  LoopBinding binding_;
  double output_;
};

class PidController final : public Controller {
 public:
  PidController(const PidConfig& cfg, const LoopBinding& binding, double dt);
  std::string name() const override { return "pid"; }
  void reset() override;
  Decision act(const Observation& obs) override;

 private:
  PidConfig cfg_;
  LoopBinding binding_;
  double dt_;
  PidState state_;
  double output_ = 0.0;
};

}  // namespace aquactl

#include "aquactl/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aquactl/error.hpp"

namespace aquactl {

void BangBangConfig::validate() const {
  if (on == off) throw ConfigError("controller.bangbang.on", "must differ from off");
  if (!(deadband >= 0)) throw ConfigError("controller.bangbang.deadband", "must be non-negative");
}

double bang_bang(double measurement, const BangBangConfig& cfg) {
  return cfg.setpoint - measurement > 0 ? cfg.on : cfg.off;
}

BangBang::BangBang(const BangBangConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

double BangBang::update(double measurement, double setpoint) {
  const double error = setpoint - measurement;
  const double half = 0.5 * cfg_.deadband;
  if (cfg_.deadband == 0.0 || !on_) {
    on_ = error > 0;
  } else if (error > half) {
    on_ = true;
  } else if (error < -half) {
    on_ = false;
  }
  return *on_ ? cfg_.on : cfg_.off;
}

void PidConfig::validate() const {
  for (const double g : {kp, ki, kd})
    if (!std::isfinite(g)) throw ConfigError("controller.pid.kp", "gains must be finite");
  if (!(u_min < u_max)) throw ConfigError("controller.pid.u_min", "must be below u_max");
  if (!(integral_min <= integral_max))
    throw ConfigError("controller.pid.integral_min", "must not exceed integral_max");
  if (!(filter_coeff >= 0 && filter_coeff < 1))
    throw ConfigError("controller.pid.filter_coeff", "must lie in [0, 1)");
}

double pid_step(double error, double dt, PidState& state, const PidConfig& cfg) {
  if (!(dt > 0)) throw std::invalid_argument("pid_step: dt must be positive");

  double integral = std::clamp(state.integral + dt * 0.5 * (error + state.prev_error),
                               cfg.integral_min, cfg.integral_max);
  double derivative = (error - state.prev_error) / dt;
  if (cfg.derivative_filter)
    derivative = cfg.filter_coeff * state.derivative + (1.0 - cfg.filter_coeff) * derivative;

  // Conditional integration: freeze the integral while the output is already
  // saturated in the direction the new error would push it.
  const double held = cfg.kp * error + cfg.ki * state.integral + cfg.kd * derivative;
  const double push = cfg.ki * (integral - state.integral);
  if ((held >= cfg.u_max && push > 0) || (held <= cfg.u_min && push < 0)) integral = state.integral;
  const double u = cfg.kp * error + cfg.ki * integral + cfg.kd * derivative;

  state.integral = integral;
  state.prev_error = error;
  state.derivative = derivative;
  return std::clamp(u, cfg.u_min, cfg.u_max);
}

std::string to_string(ControlChannel c) {
  switch (c) {
    case ControlChannel::feed: return "feed";
    case ControlChannel::temperature: return "temperature";
    case ControlChannel::oxygen: return "oxygen";
  }
  return "feed";
}

ControlChannel channel_from_string(const std::string& s) {
  if (s == "feed") return ControlChannel::feed;
  if (s == "temperature") return ControlChannel::temperature;
  if (s == "oxygen") return ControlChannel::oxygen;
  throw std::invalid_argument("unknown channel '" + s + "' (feed, temperature, oxygen)");
}

namespace {

struct LoopSignal {
  double measurement;
  double setpoint;
};

LoopSignal sense(const LoopBinding& b, const Observation& obs, double applied_output) {
  switch (b.channel) {
    case ControlChannel::feed:
      if (!obs.w_ref) throw std::logic_error("feed loop needs a reference trajectory");
      return {obs.weight, *obs.w_ref};
    case ControlChannel::temperature:
      return {obs.ambient.T + applied_output, b.setpoint};
    case ControlChannel::oxygen:
      return {obs.ambient.DO + applied_output, b.setpoint};
  }
  return {0.0, 0.0};
}

ControlAction actuate(const LoopBinding& b, const Observation& obs, double output) {
  ControlAction u{b.feed, obs.ambient.T, obs.ambient.DO};
  switch (b.channel) {
    case ControlChannel::feed: u.f = std::clamp(output, 0.0, 1.0); break;
    case ControlChannel::temperature: u.T = obs.ambient.T + output; break;
    case ControlChannel::oxygen: u.DO = std::max(0.0, obs.ambient.DO + output); break;
  }
  return u;
}

}  // namespace

BangBangController::BangBangController(const BangBangConfig& cfg, const LoopBinding& binding)
    : law_(cfg), binding_(binding), output_(cfg.off) {}

void BangBangController::reset() {
  law_.reset();
  output_ = law_.config().off;
}

Decision BangBangController::act(const Observation& obs) {
  const LoopSignal s = sense(binding_, obs, output_);
  output_ = law_.update(s.measurement, s.setpoint);
  Decision d;
  d.action = actuate(binding_, obs, output_);
  return d;
}

PidController::PidController(const PidConfig& cfg, const LoopBinding& binding, double dt)
    : cfg_(cfg), binding_(binding), dt_(dt) {
  cfg_.validate();
  if (!(dt > 0)) throw std::invalid_argument("PidController: dt must be positive");
}

void PidController::reset() {
  state_ = {};
  output_ = 0.0;
}

Decision PidController::act(const Observation& obs) {
  const LoopSignal s = sense(binding_, obs, output_);
  output_ = pid_step(s.setpoint - s.measurement, dt_, state_, cfg_);
  Decision d;
  d.action = actuate(binding_, obs, output_);
  return d;
}

}  // namespace aquactl

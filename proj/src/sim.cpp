#include "aquactl/sim.hpp"

#include <cmath>

#include "aquactl/error.hpp"

namespace aquactl {

namespace {

constexpr double kDayTolerance = 1e-9;

double k1_at(const SimConfig& cfg, double UIA) {
  return cfg.mortality ? mortality_k1(UIA, cfg.params) : 0.0;
}

template <typename Rhs>
double integrate(double x, double t, double dt, Integrator integrator, Rhs&& rhs) {
  if (integrator == Integrator::euler) return x + dt * rhs(t, x);
  const double half = 0.5 * dt;
  const double s1 = rhs(t, x);
  const double s2 = rhs(t + half, x + half * s1);
  const double s3 = rhs(t + half, x + half * s2);
  const double s4 = rhs(t + dt, x + dt * s3);
  return x + (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
}

std::int64_t whole_days(double elapsed) {
  return static_cast<std::int64_t>(std::floor(elapsed + kDayTolerance));
}

}  // namespace

std::size_t SimConfig::steps() const {
  if (!(dt > 0)) throw ConfigError("run.dt", "must be positive");
  if (tf < t0) throw ConfigError("run.tf", "must not precede t0");
  const double count = (tf - t0) / dt;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-9 * std::max(1.0, rounded))
    throw ConfigError("run.dt", "(tf - t0)/dt must be a whole number of steps");
  return static_cast<std::size_t>(rounded);
}

void SimConfig::validate() const {
  if (!(dt > 0 && dt <= 1)) throw ConfigError("run.dt", "must lie in (0, 1]");
  (void)steps();
  params.validate();
  if (const auto* ind = std::get_if<Individual>(&initial)) {
    if (!(ind->w > 0)) throw ConfigError("run.w0", "must be positive");
  } else {
    const auto& pop = std::get<Population>(initial);
    if (!(pop.xi >= 0)) throw ConfigError("run.xi0", "must be non-negative");
    if (pop.p < 0) throw ConfigError("run.p0", "must be non-negative");
    if (pop.p == 0 && pop.xi != 0)
      throw ConfigError("run.p0", "an empty pond cannot hold biomass");
  }
  if (stocking.p_s < 0) throw ConfigError("run.p_s", "must be non-negative");
  if (!(stocking.xi_i > 0)) throw ConfigError("run.xi_i", "must be positive");
}

EnvState actuated_env(const ControlAction& u, const AmbientEnv& ambient) {
  return EnvState{u.f, u.T, u.DO, ambient.UIA, ambient.rho};
}

double advance_weight(double w, const ControlAction& u, double t, double dt,
                      const EnvProfile& env, const GrowthParams& params, Integrator integrator) {
  double next = 0.0;
  try {
    next = integrate(w, t, dt, integrator, [&](double tt, double ww) {
      return individual_rhs(ww, actuated_env(u, env.at(tt)), params);
    });
  } catch (const std::domain_error& e) {
    throw SimulationError(std::string("weight left the positive domain: ") + e.what());
  }
  if (!std::isfinite(next) || !(next > 0))
    throw SimulationError("integration produced a non-positive or non-finite weight");
  return next;
}

SimState step(const SimState& state, const ControlAction& u, double t, const SimConfig& cfg) {
  if (const auto* ind = std::get_if<Individual>(&state))
    return Individual{advance_weight(ind->w, u, t, cfg.dt, cfg.env, cfg.params, cfg.integrator)};

  const auto& pop = std::get<Population>(state);
  Population next = pop;
  try {
    next.xi = integrate(pop.xi, t, cfg.dt, cfg.integrator, [&](double tt, double xi) {
      // Stocked biomass can enter an empty pond before the day's count update.
      if (pop.p == 0) return static_cast<double>(cfg.stocking.p_s) * cfg.stocking.xi_i;
      const AmbientEnv amb = cfg.env.at(tt);
      return population_rhs(Population{xi, pop.p}, actuated_env(u, amb), cfg.stocking,
                            k1_at(cfg, amb.UIA), cfg.params)
          .dxi;
    });
  } catch (const std::domain_error& e) {
    throw SimulationError(std::string("biomass left the admissible domain: ") + e.what());
  }
  if (!std::isfinite(next.xi) || next.xi < 0)
    throw SimulationError("integration produced a negative or non-finite biomass");

  // Head count moves once per whole day, using the count at the start of
  // the step that closes the day.
  const std::int64_t days = whole_days(t + cfg.dt - cfg.t0) - whole_days(t - cfg.t0);
  if (days > 0) {
    const AmbientEnv amb = cfg.env.at(t);
    for (std::int64_t d = 0; d < days; ++d) {
      const double deaths = std::floor(static_cast<double>(next.p) * k1_at(cfg, amb.UIA));
      next.p = std::max<std::int64_t>(
          0, next.p + cfg.stocking.p_s - static_cast<std::int64_t>(deaths));
    }
    if (next.p == 0) next.xi = 0.0;
  }
  return next;
}

Reference::Reference(double t0, double dt, std::vector<double> weights)
    : t0_(t0), dt_(dt), weights_(std::move(weights)) {
  if (!(dt_ > 0)) throw std::invalid_argument("Reference: dt must be positive");
}

Reference Reference::from_trajectory(const Trajectory& traj) {
  if (traj.records.empty()) throw std::invalid_argument("Reference: empty trajectory");
  std::vector<double> w;
  w.reserve(traj.records.size());
  for (const auto& r : traj.records) w.push_back(observed_weight(r.state));
  const double dt =
      traj.records.size() > 1 ? traj.records[1].t - traj.records[0].t : 1.0;
  return Reference(traj.records.front().t, dt, std::move(w));
}

double Reference::at(double t) const {
  if (weights_.empty()) throw std::logic_error("Reference: no samples");
  const double x = (t - t0_) / dt_;
  if (x <= 0) return weights_.front();
  const double last = static_cast<double>(weights_.size() - 1);
  if (x >= last) return weights_.back();
  const double i = std::floor(x);
  const auto idx = static_cast<std::size_t>(i);
  const double frac = x - i;
  if (frac < 1e-9) return weights_[idx];
  if (1.0 - frac < 1e-9) return weights_[idx + 1];
  return weights_[idx] + frac * (weights_[idx + 1] - weights_[idx]);
}

ConstantController::ConstantController(double f, std::optional<double> T,
                                       std::optional<double> DO)
    : f_(f), T_(T), DO_(DO) {
  if (!(f >= 0 && f <= 1)) throw std::invalid_argument("constant feed must lie in [0, 1]");
}

Decision ConstantController::act(const Observation& obs) {
  Decision d;
  d.action = {f_, T_.value_or(obs.ambient.T), DO_.value_or(obs.ambient.DO)};
  return d;
}

Trajectory simulate(const SimConfig& cfg, Controller& controller, const Reference* reference) {
  cfg.validate();
  const std::size_t n = cfg.steps();
  controller.reset();

  auto observe = [&](std::size_t k, const SimState& s) {
    Observation obs;
    obs.step = k;
    obs.t = cfg.time_at(k);
    obs.state = s;
    obs.weight = observed_weight(s);
    obs.ambient = cfg.env.at(obs.t);
    if (reference != nullptr && !reference->empty()) obs.w_ref = reference->at(obs.t);
    return obs;
  };
  auto record_of = [&](const Observation& obs) {
    TrajectoryRecord r;
    r.t = obs.t;
    r.state = obs.state;
    r.UIA = obs.ambient.UIA;
    r.v = v_ammonia(obs.ambient.UIA, cfg.params);
    r.k1 = k1_at(cfg, obs.ambient.UIA);
    return r;
  };

  Trajectory traj;
  traj.records.reserve(n + 1);
  SimState state = cfg.initial;
  for (std::size_t k = 0; k < n; ++k) {
    const Observation obs = observe(k, state);
    traj.records.push_back(record_of(obs));
    const Decision d = controller.act(obs);
    const ControlAction& u = d.action;
    if (!std::isfinite(u.f) || !std::isfinite(u.T) || !std::isfinite(u.DO) || u.f < 0 ||
        u.f > 1 || u.DO < 0)
      throw SimulationError("controller '" + controller.name() + "' produced an invalid action",
                            k);

    auto& rec = traj.records.back();
    rec.action = u;
    rec.tau = tau_temperature(u.T, cfg.params);
    rec.sigma = sigma_oxygen(u.DO, cfg.params);
    rec.J = d.J;
    rec.chosen_by = d.chosen_by;
    if (d.reward_prev && k > 0) traj.records[k - 1].reward = d.reward_prev;

    try {
      state = step(state, u, obs.t, cfg);
    } catch (const SimulationError& e) {
      throw SimulationError(std::string(e.what()) + " at step " + std::to_string(k), k);
    }
  }
  const Observation last = observe(n, state);
  traj.records.push_back(record_of(last));
  const FinalNote note = controller.finish(last);
  if (note.reward_prev && n > 0) traj.records[n - 1].reward = note.reward_prev;
  traj.records.back().J = note.J;
  return traj;
}

Trajectory reference_trajectory(const SimConfig& cfg, double f_ref) {
  if (!(f_ref >= 0 && f_ref <= 1)) throw std::invalid_argument("f_ref must lie in [0, 1]");
  SimConfig nominal = cfg;
  const GrowthParams& p = cfg.params;
  nominal.env = cfg.env.with_override(Channel::T, p.T_opt)
                    .with_override(Channel::DO, p.DO_hi)
                    .with_override(Channel::UIA, 0.0);
  nominal.initial = Individual{observed_weight(cfg.initial)};
  nominal.stocking = StockingPolicy{};
  ConstantController hold(f_ref, p.T_opt, p.DO_hi);
  return simulate(nominal, hold);
}

}  // namespace aquactl

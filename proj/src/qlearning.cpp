#include "aquactl/qlearning.hpp"

#include <algorithm>
#include <cmath>

#include "aquactl/error.hpp"

namespace aquactl {

std::string to_string(EpsilonVariant v) {
  return v == EpsilonVariant::clamped ? "clamped" : "decaying";
}

EpsilonVariant epsilon_variant_from_string(const std::string& s) {
  if (s == "clamped") return EpsilonVariant::clamped;
  if (s == "decaying") return EpsilonVariant::decaying;
  throw std::invalid_argument("unknown epsilon variant '" + s + "' (clamped, decaying)");
}

void QLearningConfig::validate(const std::string& section) const {
  const std::string p = section + ".";
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError(p + "alpha", "must lie in (0, 1]");
  if (!(gamma > 0 && gamma < 1)) throw ConfigError(p + "gamma", "must lie in (0, 1)");
  if (!(eps0 >= 0 && eps0 <= 1)) throw ConfigError(p + "eps0", "must lie in [0, 1]");
  if (!(t_eps > 0)) throw ConfigError(p + "t_eps", "must be positive");
  if (!(eps_min >= 0 && eps_min <= 1)) throw ConfigError(p + "eps_min", "must lie in [0, 1]");
  if (max_episodes < 1) throw ConfigError(p + "max_episodes", "must be at least 1");
  if (patience < 1) throw ConfigError(p + "patience", "must be at least 1");
  if (!(value_tolerance > 0)) throw ConfigError(p + "value_tolerance", "must be positive");
}

double epsilon(double i, const QLearningConfig& cfg) {
  if (cfg.variant == EpsilonVariant::clamped)
    return std::clamp(1.0 - cfg.eps0 * std::exp(i / cfg.t_eps), 0.0, 1.0);
  return std::clamp(cfg.eps0 * std::exp(-i / cfg.t_eps), cfg.eps_min, 1.0);
}

double exploration_probability(double i, const QLearningConfig& cfg) {
  const double e = epsilon(i, cfg);
  return cfg.variant == EpsilonVariant::clamped ? 1.0 - e : e;
}

QTable::QTable(std::size_t states, std::size_t actions)
    : q_(Eigen::MatrixXd::Zero(idx(states), idx(actions))),
      visits_(decltype(visits_)::Zero(idx(states), idx(actions))) {
  if (states == 0 || actions == 0) throw std::invalid_argument("QTable: empty dimensions");
}

std::size_t QTable::greedy(std::size_t s) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < actions(); ++a)
    if ((*this)(s, a) > (*this)(s, best)) best = a;
  return best;
}

double QTable::max_value(std::size_t s) const { return q_.row(idx(s)).maxCoeff(); }

std::vector<std::size_t> QTable::policy() const {
  std::vector<std::size_t> pi(states());
  for (std::size_t s = 0; s < states(); ++s) pi[s] = greedy(s);
  return pi;
}

void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t s_next,
              bool terminal, double alpha, double gamma) {
  const double bootstrap = terminal ? 0.0 : table.max_value(s_next);
  double& q = table(s, a);
  q = q + alpha * (r + gamma * bootstrap - q);
  ++table.visits(s, a);
}

FiniteMdp::FiniteMdp(std::vector<std::vector<std::size_t>> next,
                     std::vector<std::vector<double>> reward, std::vector<bool> terminal,
                     std::size_t start, std::size_t max_steps)
    : next_(std::move(next)),
      reward_(std::move(reward)),
      terminal_(std::move(terminal)),
      start_(start),
      max_steps_(max_steps) {
  const std::size_t S = next_.size();
  if (S == 0 || next_.front().empty()) throw std::invalid_argument("FiniteMdp: empty");
  if (reward_.size() != S || terminal_.size() != S)
    throw std::invalid_argument("FiniteMdp: table sizes differ");
  for (std::size_t s = 0; s < S; ++s) {
    if (next_[s].size() != next_.front().size() || reward_[s].size() != next_[s].size())
      throw std::invalid_argument("FiniteMdp: ragged tables");
    for (const auto n : next_[s])
      if (n >= S) throw std::invalid_argument("FiniteMdp: successor out of range");
  }
  if (start_ >= S) throw std::invalid_argument("FiniteMdp: start out of range");
  if (max_steps_ == 0) throw std::invalid_argument("FiniteMdp: max_steps must be positive");
}

std::size_t FiniteMdp::reset(Rng& rng) {
  state_ = start_;
  if (exploring_starts_) {
    std::vector<std::size_t> open;
    for (std::size_t s = 0; s < num_states(); ++s)
      if (!terminal_[s]) open.push_back(s);
    if (!open.empty())
      state_ = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
  }
  return state_;
}

Transition FiniteMdp::step(std::size_t action) {
  Transition tr;
  tr.reward = reward_[state_][action];
  tr.next_state = next_[state_][action];
  tr.terminal = terminal_[tr.next_state];
  state_ = tr.next_state;
  return tr;
}

Eigen::MatrixXd value_iteration(const FiniteMdp& mdp, double gamma, double residual,
                                int max_sweeps) {
  const auto S = static_cast<Eigen::Index>(mdp.num_states());
  const auto A = static_cast<Eigen::Index>(mdp.num_actions());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(S, A);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(S, A);
    for (Eigen::Index s = 0; s < S; ++s) {
      const auto su = static_cast<std::size_t>(s);
      if (mdp.terminal(su)) continue;
      for (Eigen::Index a = 0; a < A; ++a) {
        const auto au = static_cast<std::size_t>(a);
        const std::size_t n = mdp.next(su, au);
        const double boot = mdp.terminal(n) ? 0.0 : q.row(static_cast<Eigen::Index>(n)).maxCoeff();
        next(s, a) = mdp.reward(su, au) + gamma * boot;
      }
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change < residual) return q;
  }
  throw std::runtime_error("value_iteration: no convergence within the sweep limit");
}

std::size_t WeightGrid::bin(double w) const {
  if (!(w > lower)) return 0;
  if (!(w < upper)) return static_cast<std::size_t>(bins - 1);
  const double x = (std::log(w) - std::log(lower)) / (std::log(upper) - std::log(lower));
  return std::min(static_cast<std::size_t>(x * bins), static_cast<std::size_t>(bins - 1));
}

void MdpSpec::validate(const std::string& section) const {
  const std::string p = section + ".";
  if (!(grid.lower > 0 && grid.lower < grid.upper))
    throw ConfigError(p + "w_lower", "must be positive and below w_upper");
  if (grid.bins < 1) throw ConfigError(p + "bins", "must be at least 1");
  if (day_bins < 0) throw ConfigError(p + "day_bins", "must be non-negative");
  if (f_levels.empty()) throw ConfigError(p + "f_levels", "needs at least one level");
  for (const double f : f_levels)
    if (!(f >= 0 && f <= 1)) throw ConfigError(p + "f_levels", "levels must lie in [0, 1]");
  for (const double T : T_levels)
    if (!std::isfinite(T)) throw ConfigError(p + "T_levels", "levels must be finite");
  if (!(w0 > 0 && w0 < target)) throw ConfigError(p + "w0", "must be positive and below target");
  if (!(horizon > 0)) throw ConfigError(p + "horizon", "must be positive");
  if (!(feed_cost >= 0)) throw ConfigError(p + "feed_cost", "must be non-negative");
  if (!std::isfinite(bonus)) throw ConfigError(p + "bonus", "must be finite");
}

std::size_t MdpSpec::num_states() const {
  return static_cast<std::size_t>(grid.bins) * static_cast<std::size_t>(std::max(1, day_bins));
}

std::size_t MdpSpec::num_actions() const {
  return f_levels.size() * std::max<std::size_t>(1, T_levels.size());
}

std::size_t MdpSpec::state_index(double w, double elapsed) const {
  const std::size_t wb = grid.bin(w);
  if (day_bins == 0) return wb;
  const double frac = std::clamp(elapsed / horizon, 0.0, 1.0);
  const auto db = std::min(static_cast<std::size_t>(frac * day_bins),
                           static_cast<std::size_t>(day_bins - 1));
  return wb * static_cast<std::size_t>(day_bins) + db;
}

ControlAction MdpSpec::action(std::size_t a, const AmbientEnv& ambient) const {
  const std::size_t nT = std::max<std::size_t>(1, T_levels.size());
  if (a >= num_actions()) throw std::out_of_range("MdpSpec::action: index out of range");
  ControlAction u{f_levels[a / nT], ambient.T, ambient.DO};
  if (!T_levels.empty()) u.T = T_levels[a % nT];
  return u;
}

double growth_reward(double w, double f, double w_next, const MdpSpec& spec,
                     const GrowthParams& params) {
  double r = (w_next - w) - spec.feed_cost * f * params.R_frac * w;
  if (w_next >= spec.target) r += spec.bonus;
  return r;
}

GrowthMdp::GrowthMdp(MdpSpec spec, SimConfig sim) : spec_(std::move(spec)), sim_(std::move(sim)) {
  spec_.validate();
  sim_.validate();
}

std::size_t GrowthMdp::max_steps() const {
  return static_cast<std::size_t>(std::ceil(spec_.horizon / sim_.dt - 1e-9));
}

std::size_t GrowthMdp::reset(Rng&) {
  w_ = spec_.w0;
  k_ = 0;
  return spec_.state_index(w_, 0.0);
}

Transition GrowthMdp::step(std::size_t action) {
  const double t = sim_.time_at(k_);
  const ControlAction u = spec_.action(action, sim_.env.at(t));
  const double next = advance_weight(w_, u, t, sim_.dt, sim_.env, sim_.params, sim_.integrator);
  Transition tr;
  tr.reward = growth_reward(w_, u.f, next, spec_, sim_.params);
  tr.terminal = next >= spec_.target;
  w_ = next;
  ++k_;
  tr.next_state = spec_.state_index(w_, static_cast<double>(k_) * sim_.dt);
  return tr;
}

TrainResult train(TabularEnvironment& env, const QLearningConfig& cfg,
                  const std::function<void(const TraceEvent&)>& trace) {
  cfg.validate();
  auto emit = [&](const char* phase, int episode, std::string detail) {
    if (trace) trace(TraceEvent{phase, episode, std::move(detail)});
  };

  TrainResult out;
  out.table = QTable(env.num_states(), env.num_actions());
  std::vector<std::size_t> policy = out.table.policy();
  emit("initialize", 0,
       std::to_string(env.num_states()) + " states, " + std::to_string(env.num_actions()) +
           " actions");

  Rng rng = make_rng(cfg.seed, "qlearning");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_action(0, env.num_actions() - 1);
  int unchanged = 0;
  // Size of the latest update of each pair; unvisited pairs stay at zero.
  Eigen::MatrixXd last_change = Eigen::MatrixXd::Zero(out.table.values().rows(),
                                                      out.table.values().cols());

  for (int episode = 0; episode < cfg.max_episodes; ++episode) {
    const double explore = exploration_probability(episode, cfg);
    std::size_t s = env.reset(rng);
    emit("episode", episode, "explore=" + std::to_string(explore));

    double ret = 0.0;
    std::size_t updates = 0;
    for (std::size_t k = 0; k < env.max_steps(); ++k) {
      const std::size_t a = coin(rng) < explore ? any_action(rng) : out.table.greedy(s);
      const Transition tr = env.step(a);
      const double before = out.table(s, a);
      q_update(out.table, s, a, tr.reward, tr.next_state, tr.terminal, cfg.alpha, cfg.gamma);
      last_change(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          std::abs(out.table(s, a) - before);
      ret += tr.reward;
      ++updates;
      s = tr.next_state;
      if (tr.terminal) break;
    }
    emit("update", episode, std::to_string(updates) + " updates");
    out.returns.push_back(ret);
    out.episodes = episode + 1;

    std::vector<std::size_t> improved = out.table.policy();
    const bool same = improved == policy;
    unchanged = same ? unchanged + 1 : 0;
    policy = std::move(improved);
    emit("improve", episode, same ? "policy unchanged" : "policy changed");

    if (unchanged >= cfg.patience) {
      const double drift = last_change.maxCoeff();
      if (drift < cfg.value_tolerance) {
        out.converged = true;
        emit("stop", episode, "greedy policy stable");
        break;
      }
    }
  }
  if (!out.converged) emit("stop", out.episodes - 1, "max episodes reached");
  out.policy = std::move(policy);
  return out;
}

QPolicyController::QPolicyController(QTable table, MdpSpec spec, double t0)
    : table_(std::move(table)), spec_(std::move(spec)), t0_(t0) {
  spec_.validate();
  if (table_.states() != spec_.num_states() || table_.actions() != spec_.num_actions())
    throw std::invalid_argument("QPolicyController: table does not match the MDP spec");
}

Decision QPolicyController::act(const Observation& obs) {
  const std::size_t s = spec_.state_index(obs.weight, obs.t - t0_);
  Decision d;
  d.action = spec_.action(table_.greedy(s), obs.ambient);
  d.chosen_by = "q";
  return d;
}

}  // namespace aquactl

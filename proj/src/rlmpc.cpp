#include "aquactl/rlmpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aquactl/error.hpp"

namespace aquactl {

double hybrid_discount(int M, int N) {
  if (N < 1 || M < 1 || M > N)
    throw std::invalid_argument("hybrid_discount: requires 1 <= M <= N");
  return 1.0 - static_cast<double>(M) / static_cast<double>(N);
}

double hybrid_reward(double J_k, double J_k1) { return -(J_k1 - J_k); }

std::optional<double> hybrid_reward(const MpcSolution& at_k, const MpcSolution& at_k1) {
  if (!at_k.feasible || !at_k1.feasible) return std::nullopt;
  return hybrid_reward(at_k.J, at_k1.J);
}

namespace {

std::size_t nearest_level(const std::vector<double>& levels, double x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (std::abs(levels[i] - x) < std::abs(levels[best] - x)) best = i;
  return best;
}

}  // namespace

ControlAction ActionLattice::at(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("ActionLattice: index out of range");
  const std::size_t d = index % DO.size();
  const std::size_t t = (index / DO.size()) % T.size();
  const std::size_t fi = index / (DO.size() * T.size());
  return {f[fi], T[t], DO[d]};
}

std::size_t ActionLattice::nearest(const ControlAction& u) const {
  return (nearest_level(f, u.f) * T.size() + nearest_level(T, u.T)) * DO.size() +
         nearest_level(DO, u.DO);
}

void RlMpcConfig::validate() const {
  const std::string p = "controller.rlmpc.";
  mpc.validate();
  // alpha = 0 freezes the table, which the hybrid allows; gamma is derived.
  QLearningConfig check = q;
  check.gamma = 0.5;
  if (check.alpha == 0.0) check.alpha = 1.0;
  check.validate("controller.rlmpc");
  if (!(q.alpha >= 0 && q.alpha <= 1)) throw ConfigError(p + "alpha", "must lie in [0, 1]");

  const std::array<std::pair<const char*, const std::vector<double>*>, 3> channels = {
      {{"f_levels", &lattice.f}, {"T_levels", &lattice.T}, {"DO_levels", &lattice.DO}}};
  for (int c = 0; c < 3; ++c) {
    const auto& [key, levels] = channels[static_cast<std::size_t>(c)];
    if (levels->empty()) throw ConfigError(p + key, "needs at least one level");
    for (const double x : *levels)
      if (!(x >= mpc.bounds.lower(c) && x <= mpc.bounds.upper(c)))
        throw ConfigError(p + key, "levels must lie within the MPC bounds");
  }
  if (!(grid.lower > 0 && grid.lower < grid.upper))
    throw ConfigError(p + "w_lower", "must be positive and below w_upper");
  if (grid.bins < 1) throw ConfigError(p + "bins", "must be at least 1");
  if (!(guide0 >= 0 && guide0 <= 1)) throw ConfigError(p + "guide0", "must lie in [0, 1]");
  if (!(guide_min >= 0 && guide_min <= 1))
    throw ConfigError(p + "guide_min", "must lie in [0, 1]");
  if (!(t_guide > 0)) throw ConfigError(p + "t_guide", "must be positive");
  if (episodes < 1) throw ConfigError(p + "episodes", "must be at least 1");
}

double RlMpcConfig::guide_probability(std::size_t global_step) const {
  const double p = guide0 * std::exp(-static_cast<double>(global_step) / t_guide);
  return std::clamp(std::max(guide_min, p), 0.0, 1.0);
}

RlMpcController::RlMpcController(const RlMpcConfig& cfg, MpcModel model)
    : cfg_(cfg), model_(std::move(model)) {
  cfg_.validate();
  table_ = QTable(static_cast<std::size_t>(cfg_.grid.bins), cfg_.lattice.size());
  rng_ = make_rng(cfg_.q.seed, "rlmpc");
}

void RlMpcController::reset() {
  prev_.reset();
  warm_.reset();
  pending_.reset();
}

MpcSolution RlMpcController::solve(const Observation& obs) {
  const std::uint64_t seed = derive_seed(cfg_.mpc.seed, "mpc-solve", obs.step);
  MpcSolution sol =
      solve_horizon(model_, cfg_.mpc, obs.weight, obs.t, prev_, warm_ ? &*warm_ : nullptr, seed);
  if (sol.feasible) warm_ = shift_sequence(sol.inputs);
  return sol;
}

std::optional<double> RlMpcController::credit(const MpcSolution& sol, std::size_t state) {
  std::optional<double> r;
  if (pending_ && sol.feasible) {
    r = hybrid_reward(pending_->J, sol.J);
    q_update(table_, pending_->state, pending_->action, *r, state, false, cfg_.q.alpha,
             cfg_.gamma());
  }
  pending_.reset();
  return r;
}

bool RlMpcController::admissible(const ControlAction& u, const Observation& obs) const {
  if (!cfg_.mpc.bounds.contains(u)) return false;
  try {
    const double next = advance_weight(obs.weight, u, obs.t, model_.dt, model_.forecast,
                                       model_.params, model_.integrator);
    return next >= cfg_.mpc.w_lo && next <= cfg_.mpc.w_hi;
  } catch (const SimulationError&) {
    return false;
  }
}

Decision RlMpcController::act(const Observation& obs) {
  const std::size_t s = cfg_.grid.bin(obs.weight);
  const MpcSolution sol = solve(obs);
  Decision d;
  d.reward_prev = credit(sol, s);
  if (sol.feasible) d.J = sol.J;

  const bool guided = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) <
                      cfg_.guide_probability(global_step_);
  ++global_step_;

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t mpc_index = sol.feasible ? cfg_.lattice.nearest(sol.first()) : kNone;
  std::size_t applied_index = 0;
  if (sol.feasible && guided) {
    d.action = sol.first();
    d.chosen_by = "mpc";
    applied_index = mpc_index;
  } else {
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < cfg_.lattice.size(); ++a) {
      if (!admissible(cfg_.lattice.at(a), obs)) continue;
      if (!best || table_(s, a) > table_(s, *best) ||
          (table_(s, a) == table_(s, *best) && a == mpc_index))
        best = a;
    }
    if (sol.feasible && (!best || *best == mpc_index)) {
      d.action = sol.first();
      d.chosen_by = "mpc";
      applied_index = mpc_index;
    } else if (best) {
      d.action = cfg_.lattice.at(*best);
      d.chosen_by = "q";
      applied_index = *best;
    } else {
      d.action = prev_ ? *prev_ : cfg_.mpc.bounds.clamp(sol.first());
      d.chosen_by = "fallback";
      applied_index = cfg_.lattice.nearest(d.action);
    }
  }
  if (sol.feasible) pending_ = Pending{s, applied_index, sol.J};
  prev_ = d.action;
  return d;
}

FinalNote RlMpcController::finish(const Observation& obs) {
  const MpcSolution sol = solve(obs);
  FinalNote note;
  note.reward_prev = credit(sol, cfg_.grid.bin(obs.weight));
  if (sol.feasible) note.J = sol.J;
  return note;
}

AuditResult audit_constraints(const Trajectory& traj, const MpcConfig& cfg, const MpcModel& model) {
  AuditResult out;
  for (const auto& rec : traj.records) {
    if (!rec.action) continue;
    ++out.checked;
    if (!cfg.bounds.contains(*rec.action)) ++out.bound_violations;
    try {
      const double next = advance_weight(observed_weight(rec.state), *rec.action, rec.t, model.dt,
                                         model.forecast, model.params, model.integrator);
      if (next < cfg.w_lo || next > cfg.w_hi) ++out.state_violations;
    } catch (const SimulationError&) {
      ++out.state_violations;
    }
  }
  return out;
}

}  // namespace aquactl

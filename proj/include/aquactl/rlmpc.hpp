#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aquactl/mpc.hpp"
#include "aquactl/qlearning.hpp"

namespace aquactl {

/// gamma = 1 - M/N. Throws std::invalid_argument unless 1 <= M <= N.
double hybrid_discount(int M, int N);

/// r_{k+1} = -(J_{k+1} - J_k).
double hybrid_reward(double J_k, double J_k1);

/// Same, but undefined (nullopt) unless both solves were feasible.
std::optional<double> hybrid_reward(const MpcSolution& at_k, const MpcSolution& at_k1);

/// Candidate actions for the Q side: every combination of the channel levels.
struct ActionLattice {
  std::vector<double> f{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> T{28.0, 33.0};
  std::vector<double> DO{5.0, 8.0};

  std::size_t size() const { return f.size() * T.size() * DO.size(); }
  ControlAction at(std::size_t index) const;
  /// Index of the lattice point nearest to u, channel by channel.
  std::size_t nearest(const ControlAction& u) const;
};

struct RlMpcConfig {
  MpcConfig mpc;
  QLearningConfig q;  ///< gamma is ignored and replaced by hybrid_discount(M, N)
  ActionLattice lattice;
  WeightGrid grid;
  /// Probability of applying the MPC move at global step k:
  /// max(guide_min, guide0 exp(-k / t_guide)).
  double guide0 = 1.0;
  double guide_min = 0.2;
  double t_guide = 120.0;
  int episodes = 3;  ///< closed-loop rollouts run by the harness; Q carries over

  void validate() const;
  double gamma() const { return hybrid_discount(mpc.M, mpc.N); }
  double guide_probability(std::size_t global_step) const;
};

/// Q-learning driven by MPC costs. Each step solves the MPC problem at the
/// measured state, credits the previous transition with J_k - J_{k+1}, and
/// applies either the MPC first move or the Q-greedy feasible lattice action.
/// Q ties are resolved in favour of the lattice point nearest the MPC move, in
/// which case the exact MPC move is applied. Infeasible solves give no reward
/// and no update.
class RlMpcController final : public Controller {
 public:
  RlMpcController(const RlMpcConfig& cfg, MpcModel model);
  std::string name() const override { return "rlmpc"; }
  void reset() override;
  Decision act(const Observation& obs) override;
  FinalNote finish(const Observation& obs) override;

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const RlMpcConfig& config() const { return cfg_; }

 private:
  struct Pending {
    std::size_t state;
    std::size_t action;
    double J;
  };

  MpcSolution solve(const Observation& obs);
  std::optional<double> credit(const MpcSolution& sol, std::size_t state);
  bool admissible(const ControlAction& u, const Observation& obs) const;

  RlMpcConfig cfg_;
  MpcModel model_;
  QTable table_;
  Rng rng_;
  std::size_t global_step_ = 0;
  std::optional<ControlAction> prev_;
  std::optional<InputSequence> warm_;
  std::optional<Pending> pending_;
};

struct AuditResult {
  int bound_violations = 0;  ///< applied actions outside the input box
  int state_violations = 0;  ///< one-step predictions outside [w_lo, w_hi]
  int checked = 0;
  bool ok() const { return bound_violations == 0 && state_violations == 0; }
};

/// Post-hoc constraint check of every applied action in a trajectory.
AuditResult audit_constraints(const Trajectory& traj, const MpcConfig& cfg, const MpcModel& model);

}  // namespace aquactl

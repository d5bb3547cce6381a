#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aquactl/rng.hpp"
#include "aquactl/sim.hpp"

namespace aquactl {

enum class EpsilonVariant { clamped, decaying };

std::string to_string(EpsilonVariant v);
EpsilonVariant epsilon_variant_from_string(const std::string& s);

struct QLearningConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double eps0 = 1.0;
  double t_eps = 200.0;   ///< episodes
  double eps_min = 0.05;  ///< floor of the decaying schedule
  EpsilonVariant variant = EpsilonVariant::decaying;
  int max_episodes = 3000;
  int patience = 10;  ///< unchanged greedy policies needed to stop
  /// Bound on the latest |dQ| of every visited pair; infinity disables it.
  double value_tolerance = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  void validate(const std::string& section = "controller.qlearning") const;
};

/// Schedule value at episode i, as each variant defines it. clamped:
/// greedy probability clamp(1 - eps0 exp(i / t_eps), 0, 1). decaying:
/// exploration probability eps0 exp(-i / t_eps) clamped to [eps_min, 1].
double epsilon(double i, const QLearningConfig& cfg);

/// Probability of taking a random action at episode i under either variant.
double exploration_probability(double i, const QLearningConfig& cfg);

/// Dense Q(s, a) with visit counts. Greedy ties go to the lowest index.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions);

  std::size_t states() const { return static_cast<std::size_t>(q_.rows()); }
  std::size_t actions() const { return static_cast<std::size_t>(q_.cols()); }

  double& operator()(std::size_t s, std::size_t a) { return q_(idx(s), idx(a)); }
  double operator()(std::size_t s, std::size_t a) const { return q_(idx(s), idx(a)); }
  std::int64_t& visits(std::size_t s, std::size_t a) { return visits_(idx(s), idx(a)); }
  std::int64_t visits(std::size_t s, std::size_t a) const { return visits_(idx(s), idx(a)); }

  std::size_t greedy(std::size_t s) const;
  double max_value(std::size_t s) const;
  std::vector<std::size_t> policy() const;

  const Eigen::MatrixXd& values() const { return q_; }
  Eigen::MatrixXd& values() { return q_; }

  bool operator==(const QTable& o) const {
    return q_.rows() == o.q_.rows() && q_.cols() == o.q_.cols() && q_ == o.q_ &&
           visits_ == o.visits_;
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
  Eigen::MatrixXd q_;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> visits_;
};

/// Q(s,a) <- Q(s,a) + alpha [r + gamma max_a' Q(s',a') - Q(s,a)], with the
/// bootstrap term dropped when s' is terminal. Increments the visit count.
void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t s_next,
              bool terminal, double alpha, double gamma);

struct Transition {
  std::size_t next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Episodic environment with finitely many states and actions.
class TabularEnvironment {
 public:
  virtual ~TabularEnvironment() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  /// Starts an episode and returns the initial state.
  virtual std::size_t reset(Rng& rng) = 0;
  virtual Transition step(std::size_t action) = 0;
  /// Steps after which an episode is cut off.
  virtual std::size_t max_steps() const = 0;
};

/// Deterministic MDP given by explicit tables.
class FiniteMdp final : public TabularEnvironment {
 public:
  FiniteMdp(std::vector<std::vector<std::size_t>> next, std::vector<std::vector<double>> reward,
            std::vector<bool> terminal, std::size_t start, std::size_t max_steps);

  /// Start each episode in a uniformly drawn non-terminal state.
  void set_exploring_starts(bool on) { exploring_starts_ = on; }

  std::size_t num_states() const override { return next_.size(); }
  std::size_t num_actions() const override { return next_.front().size(); }
  std::size_t reset(Rng& rng) override;
  Transition step(std::size_t action) override;
  std::size_t max_steps() const override { return max_steps_; }

  std::size_t next(std::size_t s, std::size_t a) const { return next_[s][a]; }
  double reward(std::size_t s, std::size_t a) const { return reward_[s][a]; }
  bool terminal(std::size_t s) const { return terminal_[s]; }

 private:
  std::vector<std::vector<std::size_t>> next_;
  std::vector<std::vector<double>> reward_;
  std::vector<bool> terminal_;
  std::size_t start_;
  std::size_t max_steps_;
  bool exploring_starts_ = false;
  std::size_t state_ = 0;
};

/// Optimal Q of a deterministic MDP by Bellman iteration until the sup-norm
/// change drops below `residual`. Terminal rows stay zero.
Eigen::MatrixXd value_iteration(const FiniteMdp& mdp, double gamma, double residual = 1e-12,
                                int max_sweeps = 1000000);

/// Log-uniform bins over [lower, upper]; weights outside fall in the edge bins.
struct WeightGrid {
  double lower = 1.0;
  double upper = 1000.0;
  int bins = 64;

  std::size_t bin(double w) const;
};

struct MdpSpec {
  WeightGrid grid;
  int day_bins = 0;  ///< 0 drops the age dimension
  std::vector<double> f_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> T_levels;  ///< empty: temperature follows the ambient profile
  double target = 300.0;         ///< desired weight
  double w0 = 50.0;
  double horizon = 60.0;  ///< days per episode
  double feed_cost = 0.1;
  double bonus = 10.0;

  void validate(const std::string& section = "controller.qlearning") const;
  std::size_t num_states() const;
  std::size_t num_actions() const;
  std::size_t state_index(double w, double elapsed) const;
  /// Action for index a; T and DO fall back to the ambient values.
  ControlAction action(std::size_t a, const AmbientEnv& ambient) const;
};

/// Per-step reward: (w' - w) - c_f f R_frac w, plus the bonus when w' reaches
/// the target.
double growth_reward(double w, double f, double w_next, const MdpSpec& spec,
                     const GrowthParams& params);

/// The growth model as an episodic environment: individual weight from w0,
/// steps of sim.dt, ending at the target weight or after `horizon` days.
class GrowthMdp final : public TabularEnvironment {
 public:
  GrowthMdp(MdpSpec spec, SimConfig sim);

  std::size_t num_states() const override { return spec_.num_states(); }
  std::size_t num_actions() const override { return spec_.num_actions(); }
  std::size_t reset(Rng& rng) override;
  Transition step(std::size_t action) override;
  std::size_t max_steps() const override;

  const MdpSpec& spec() const { return spec_; }
  const SimConfig& sim() const { return sim_; }
  double weight() const { return w_; }

 private:
  MdpSpec spec_;
  SimConfig sim_;
  double w_ = 0.0;
  std::size_t k_ = 0;
};

/// One line of the Algorithm 1 trace.
struct TraceEvent {
  std::string phase;  ///< initialize, episode, update, improve, stop
  int episode = 0;
  std::string detail;
};

struct TrainResult {
  QTable table;
  std::vector<std::size_t> policy;
  int episodes = 0;
  bool converged = false;
  std::vector<double> returns;  ///< undiscounted return per episode
};

/// Algorithm 1: initialize Q, then per episode reset, roll an epsilon-greedy
/// episode with a Q update per step, recompute the greedy policy, and stop
/// once it has stayed unchanged for `patience` episodes (and, if set, the last
/// update of every visited pair was below value_tolerance). Stops unconverged at
/// max_episodes.
TrainResult train(TabularEnvironment& env, const QLearningConfig& cfg,
                  const std::function<void(const TraceEvent&)>& trace = {});

/// Applies the greedy action of a trained table.
class QPolicyController final : public Controller {
 public:
  QPolicyController(QTable table, MdpSpec spec, double t0);
  std::string name() const override { return "qlearning"; }
  Decision act(const Observation& obs) override;

 private:
  QTable table_;
  MdpSpec spec_;
  double t0_;
};

}  // namespace aquactl

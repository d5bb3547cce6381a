#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aquactl/action.hpp"
#include "aquactl/growth.hpp"
#include "aquactl/profile.hpp"

namespace aquactl {

enum class Integrator { euler, rk4 };

/// Time-stepping failure. step_index is npos when raised outside a rollout.
class SimulationError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  explicit SimulationError(const std::string& what, std::size_t step_index = npos)
      : std::runtime_error(what), step_index_(step_index) {}
  std::size_t step_index() const { return step_index_; }

 private:
  std::size_t step_index_;
};

struct SimConfig {
  double t0 = 0.0;
  double tf = 60.0;
  double dt = 1.0;
  Integrator integrator = Integrator::rk4;
  std::uint64_t seed = 7;
  SimState initial = Individual{50.0};
  StockingPolicy stocking;
  EnvProfile env;
  GrowthParams params;
  bool mortality = true;  ///< false pins k1 to zero

  /// Number of steps; throws std::invalid_argument unless (tf - t0)/dt is whole.
  std::size_t steps() const;
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  void validate() const;
};

/// Full environment seen by the fish: controlled channels from the action,
/// UIA and rho from the ambient profile.
EnvState actuated_env(const ControlAction& u, const AmbientEnv& ambient);

/// Advances a single weight by one dt under a held action. Throws
/// SimulationError when the weight becomes non-positive or non-finite.
double advance_weight(double w, const ControlAction& u, double t, double dt,
                      const EnvProfile& env, const GrowthParams& params, Integrator integrator);

/// One zero-order-hold step of the configured model from time t.
/// Population counts change only when the step ends on a whole day.
SimState step(const SimState& state, const ControlAction& u, double t, const SimConfig& cfg);

struct TrajectoryRecord {
  double t = 0.0;
  SimState state;
  std::optional<ControlAction> action;  ///< applied over [t, t + dt)
  double UIA = 0.0;
  std::optional<double> tau;
  std::optional<double> sigma;
  double v = 1.0;
  double k1 = 0.0;
  std::optional<double> reward;  ///< reward of the transition leaving this record
  std::optional<double> J;       ///< optimizer objective evaluated at this record
  std::string chosen_by;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  bool operator==(const Trajectory&) const = default;
};

/// Reference weight as a function of time, backed by a sampled trajectory on
/// a uniform grid. Off-grid times interpolate linearly; beyond the end the
/// last sample is held.
class Reference {
 public:
  Reference() = default;
  Reference(double t0, double dt, std::vector<double> weights);
  static Reference from_trajectory(const Trajectory& traj);

  double at(double t) const;
  bool empty() const { return weights_.empty(); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> weights_;
};

struct Observation {
  std::size_t step = 0;
  double t = 0.0;
  SimState state;
  double weight = 0.0;  ///< observed_weight(state)
  AmbientEnv ambient;
  std::optional<double> w_ref;
};

/// What a controller hands back each step. reward_prev, when set, is written
/// to the previous record (the transition that led to this observation).
struct Decision {
  ControlAction action;
  std::optional<double> J;
  std::optional<double> reward_prev;
  std::string chosen_by;
};

struct FinalNote {
  std::optional<double> J;
  std::optional<double> reward_prev;
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;
  /// Called once before the first step of each rollout.
  virtual void reset() {}
  virtual Decision act(const Observation& obs) = 0;
  /// Called with the terminal observation after the last step.
  virtual FinalNote finish(const Observation&) { return {}; }
};

/// Holds one action for the whole run; T and DO follow the ambient profile
/// unless pinned.
class ConstantController final : public Controller {
 public:
  explicit ConstantController(double f, std::optional<double> T = {},
                              std::optional<double> DO = {});
  std::string name() const override { return "constant"; }
  Decision act(const Observation& obs) override;

 private:
  double f_;
  std::optional<double> T_;
  std::optional<double> DO_;
};

/// Closed-loop rollout. Errors from step are rethrown as SimulationError
/// carrying the failing step index.
Trajectory simulate(const SimConfig& cfg, Controller& controller,
                    const Reference* reference = nullptr);

/// Nominal-model rollout under T = T_opt, DO = DO_hi, UIA = 0 and a constant
/// feed f_ref, starting from the observed initial weight. Individual model
/// regardless of cfg.initial.
Trajectory reference_trajectory(const SimConfig& cfg, double f_ref);

}  // namespace aquactl

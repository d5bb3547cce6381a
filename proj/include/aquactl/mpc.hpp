#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aquactl/action.hpp"
#include "aquactl/sim.hpp"

namespace aquactl {

enum class StageCostKind { tracking, economic };
enum class Sampler { cross_entropy, exhaustive };

std::string to_string(StageCostKind k);
std::string to_string(Sampler s);

/// Receding-horizon settings. Inputs vary over the first M steps and are held
/// for the remaining N - M steps of the prediction.
struct MpcConfig {
  int N = 10;
  int M = 3;
  ActionBounds bounds;
  double rate_weight = 0.0;  ///< weight on |u_i - u_{i-1}|^2
  double w_lo = 1.0;         ///< state bounds on the predicted weight
  double w_hi = 1e5;
  StageCostKind cost = StageCostKind::tracking;
  double q_w = 1.0;  ///< tracking: weight on (w - w_ref)^2
  double r_f = 0.1;  ///< tracking: weight on f^2
  double price = 1.0;      ///< economic: value per kcal gained
  double feed_cost = 0.5;  ///< economic: cost per kcal fed
  int samples = 64;
  double elite_frac = 0.125;
  int iterations = 5;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::cross_entropy;
  /// Admissible levels per channel (f, T, DO); empty means continuous.
  std::array<std::vector<double>, 3> lattice;

  void validate() const;
};

/// Penalty added per predicted step that leaves [w_lo, w_hi].
inline constexpr double kStateBoundPenalty = 1e9;

/// What a solve plans against: the growth model, the environment forecast and
/// the tracking reference.
struct MpcModel {
  GrowthParams params;
  EnvProfile forecast;
  Reference reference;
  double dt = 1.0;
  Integrator integrator = Integrator::rk4;

  static MpcModel from(const SimConfig& cfg, Reference reference);
};

/// One row per control-horizon step, columns (f, T, DO).
using InputSequence = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Per-day stage cost.
///
/// tracking: q_w (w - w_ref)^2 + r_f f^2 + rate |du|^2
/// economic: -(price dw/dt - feed_cost f R_frac w) + rate |du|^2
///
/// du is zero when there is no previous action.
double stage_cost(double w, double w_ref, const ControlAction& u,
                  const std::optional<ControlAction>& prev, const AmbientEnv& ambient,
                  const MpcConfig& cfg, const GrowthParams& params);

struct Rollout {
  double J = 0.0;                 ///< objective including state-bound penalties
  int violations = 0;             ///< predicted steps outside the state bounds
  std::vector<double> predicted;  ///< N + 1 weights, starting at the measurement
  bool feasible() const { return violations == 0; }
};

/// Objective of an input sequence over the prediction horizon, discretized at
/// the model dt. Step i holds u_i over [t_i, t_{i+1}); the input and economic
/// terms are taken at t_i, the tracking error at the state reached at t_{i+1}.
Rollout evaluate_sequence(const MpcModel& model, const MpcConfig& cfg, double w0, double t_k,
                          const InputSequence& inputs, const std::optional<ControlAction>& prev);

struct MpcSolution {
  InputSequence inputs;
  std::vector<double> predicted;
  double J = std::numeric_limits<double>::infinity();
  bool feasible = false;

  ControlAction first() const { return ControlAction::from(inputs.row(0).transpose()); }
};

/// Previous solution advanced by one step; the last input is repeated.
InputSequence shift_sequence(const InputSequence& inputs);

/// Sampling-based search over admissible input sequences.
///
/// Cross-entropy mode draws `samples` sequences per iteration from a per-step
/// Gaussian clamped to the bounds (snapped to the lattice when one is set),
/// refits the Gaussian to the elite fraction, and keeps the best sequence
/// seen. The warm start, if given, is the first candidate evaluated.
/// Exhaustive mode enumerates every lattice sequence.
///
/// Deterministic for a given seed. The returned J is the exact rollout
/// objective of the returned inputs; `feasible` is false when no candidate
/// met the state bounds.
MpcSolution solve_horizon(const MpcModel& model, const MpcConfig& cfg, double current_w,
                          double t_k, const std::optional<ControlAction>& prev,
                          const InputSequence* warm_start, std::uint64_t seed);

/// Receding-horizon controller: solves from the measured weight each step,
/// applies the first input, warm-starts the next solve from the shifted
/// solution. On an infeasible solve it repeats the previous action and marks
/// the record "fallback".
class MpcController final : public Controller {
 public:
  MpcController(const MpcConfig& cfg, MpcModel model);
  std::string name() const override { return "mpc"; }
  void reset() override;
  Decision act(const Observation& obs) override;

  const MpcSolution& last_solution() const { return last_; }
  const MpcConfig& config() const { return cfg_; }
  const MpcModel& model() const { return model_; }

 private:
  MpcConfig cfg_;
  MpcModel model_;
  std::optional<ControlAction> prev_;
  std::optional<InputSequence> warm_;
  MpcSolution last_;
};

}  // namespace aquactl

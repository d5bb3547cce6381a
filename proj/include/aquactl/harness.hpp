#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aquactl/config.hpp"
#include "aquactl/qlearning.hpp"
#include "aquactl/report.hpp"

namespace aquactl {

struct RunResult {
  std::string controller;
  Trajectory trajectory;
  RunReport report;
  std::optional<QTable> table;  ///< learned table for qlearning and rlmpc runs
};

/// Reference trajectory of the scenario (constant f_ref under ideal water).
Trajectory scenario_reference(const Scenario& s);

/// Trains the tabular agent on the growth MDP of the scenario.
TrainResult train_scenario_q(const Scenario& s,
                             const std::function<void(const TraceEvent&)>& trace = {});

/// Runs the named controller in closed loop. qlearning trains first; rlmpc
/// runs its configured number of episodes and reports the last one.
RunResult run_controller(const Scenario& s, const std::string& controller,
                         const Trajectory& reference);

/// Runs every named controller on the same scenario and seed.
std::vector<RunResult> compare_controllers(const Scenario& s,
                                           const std::vector<std::string>& controllers);

/// File names written under the output directory.
std::string trajectory_path(const std::string& dir, const Scenario& s, const std::string& ctrl);
std::string reference_path(const std::string& dir, const Scenario& s);
std::string qtable_path(const std::string& dir, const Scenario& s, const std::string& ctrl);
std::string compare_path(const std::string& dir, const Scenario& s, const std::string& ext);

}  // namespace aquactl

#include "aquactl/harness.hpp"

#include <chrono>
#include <filesystem>
#include <stdexcept>

#include "aquactl/error.hpp"
#include "aquactl/rlmpc.hpp"

namespace aquactl {

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

Trajectory scenario_reference(const Scenario& s) {
  return reference_trajectory(s.sim_config(), s.f_ref);
}

TrainResult train_scenario_q(const Scenario& s,
                             const std::function<void(const TraceEvent&)>& trace) {
  GrowthMdp mdp(s.mdp_spec(), s.sim_config());
  return train(mdp, s.qlearning_config(), trace);
}

RunResult run_controller(const Scenario& s, const std::string& controller,
                         const Trajectory& reference) {
  const SimConfig sim = s.sim_config();
  const Reference ref = Reference::from_trajectory(reference);
  const auto start = std::chrono::steady_clock::now();

  RunResult out;
  out.controller = controller;
  if (controller == "constant") {
    ConstantController c(s.constant.f, s.constant.T, s.constant.DO);
    out.trajectory = simulate(sim, c, &ref);
  } else if (controller == "bangbang") {
    BangBangConfig cfg = s.bangbang;
    cfg.setpoint = s.bangbang_loop.setpoint;
    BangBangController c(cfg, s.bangbang_loop);
    out.trajectory = simulate(sim, c, &ref);
  } else if (controller == "pid") {
    PidController c(s.pid, s.pid_loop, sim.dt);
    out.trajectory = simulate(sim, c, &ref);
  } else if (controller == "mpc") {
    MpcController c(s.mpc_config(), MpcModel::from(sim, ref));
    out.trajectory = simulate(sim, c, &ref);
  } else if (controller == "qlearning") {
    TrainResult trained = train_scenario_q(s);
    QPolicyController c(trained.table, s.mdp_spec(), sim.t0);
    out.trajectory = simulate(sim, c, &ref);
    out.table = std::move(trained.table);
  } else if (controller == "rlmpc") {
    const RlMpcConfig cfg = s.rlmpc_config();
    RlMpcController c(cfg, MpcModel::from(sim, ref));
    for (int e = 0; e < cfg.episodes; ++e) out.trajectory = simulate(sim, c, &ref);
    out.table = c.table();
  } else {
    throw ConfigError("run.controller", "unknown controller '" + controller + "'");
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  out.report = compute_report(out.trajectory, s.params, &ref, controller);
  out.report.wall_clock_s = elapsed.count();
  return out;
}

std::vector<RunResult> compare_controllers(const Scenario& s,
                                           const std::vector<std::string>& controllers) {
  if (controllers.empty()) throw ConfigError("run.controller", "no controllers to compare");
  const Trajectory reference = scenario_reference(s);
  std::vector<RunResult> out;
  out.reserve(controllers.size());
  for (const auto& c : controllers) out.push_back(run_controller(s, c, reference));
  return out;
}

std::string trajectory_path(const std::string& dir, const Scenario& s, const std::string& ctrl) {
  return join_path(dir, s.name + "_" + ctrl + ".csv");
}

std::string reference_path(const std::string& dir, const Scenario& s) {
  return join_path(dir, s.name + "_reference.csv");
}

std::string qtable_path(const std::string& dir, const Scenario& s, const std::string& ctrl) {
  return join_path(dir, s.name + "_" + ctrl + "_qtable.csv");
}

std::string compare_path(const std::string& dir, const Scenario& s, const std::string& ext) {
  return join_path(dir, s.name + "_compare." + ext);
}

}  // namespace aquactl

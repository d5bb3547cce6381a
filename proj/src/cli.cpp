#include "aquactl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "aquactl/csv.hpp"
#include "aquactl/error.hpp"
#include "aquactl/harness.hpp"
#include "aquactl/text.hpp"

namespace aquactl {

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> controllers;
  bool quiet = false;
  bool trace = false;
  std::string export_file;
};

Scenario load(const Options& o) {
  Scenario s = o.config.empty() ? Scenario{} : load_scenario(o.config);
  if (o.seed) s.seed = *o.seed;
  s.validate();
  return s;
}

std::string output_dir(const Options& o) {
  std::string dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv("AQUACTL_OUT");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

void write_run(const RunResult& r, const Scenario& s, const std::string& dir,
               std::vector<std::string>& written) {
  const std::string path = trajectory_path(dir, s, r.controller);
  write_trajectory(r.trajectory, path);
  written.push_back(path);
  if (r.table) {
    const std::string q = qtable_path(dir, s, r.controller);
    write_qtable(*r.table, q);
    written.push_back(q);
  }
}

int run_single(const Options& o, const std::string& controller, std::ostream& out) {
  const Scenario s = load(o);
  const std::string dir = output_dir(o);
  const Trajectory ref = scenario_reference(s);
  const RunResult r = run_controller(s, controller, ref);
  std::vector<std::string> written;
  write_run(r, s, dir, written);
  if (!o.quiet) {
    out << compare_text({r.report}, true);
    for (const auto& p : written) out << "wrote " << p << '\n';
  }
  return 0;
}

int run_command(const std::string& cmd, const Options& o, std::ostream& out) {
  if (cmd == "export-defaults") {
    const Scenario s = load(o);
    const std::string text = export_scenario(s);
    if (o.export_file.empty())
      out << text;
    else
      write_file(o.export_file, text);
    return 0;
  }
  if (cmd == "simulate") {
    const Scenario s = load(o);
    if (o.controllers.size() > 1)
      throw ConfigError("run.controller", "simulate takes a single controller");
    return run_single(o, o.controllers.empty() ? s.controller : o.controllers.front(), out);
  }
  if (cmd == "run-mpc") return run_single(o, "mpc", out);
  if (cmd == "run-rlmpc") return run_single(o, "rlmpc", out);
  if (cmd == "reference") {
    const Scenario s = load(o);
    const std::string path = reference_path(output_dir(o), s);
    write_trajectory(scenario_reference(s), path);
    if (!o.quiet) out << "wrote " << path << '\n';
    return 0;
  }
  if (cmd == "train-q") {
    const Scenario s = load(o);
    const std::string dir = output_dir(o);
    std::string trace;
    const TrainResult r = train_scenario_q(s, [&](const TraceEvent& e) {
      if (o.trace) trace += e.phase + ' ' + std::to_string(e.episode) + ' ' + e.detail + '\n';
    });
    const std::string path = qtable_path(dir, s, "qlearning");
    write_qtable(r.table, path);
    if (o.trace) write_file((std::filesystem::path(dir) / (s.name + "_qtrace.txt")).string(), trace);
    if (!o.quiet) {
      out << "episodes " << r.episodes << (r.converged ? " (converged)" : " (not converged)")
          << '\n';
      out << "wrote " << path << '\n';
    }
    return 0;
  }
  if (cmd == "compare") {
    const Scenario s = load(o);
    const std::vector<std::string> names =
        o.controllers.empty() ? std::vector<std::string>{"constant", "pid", "mpc"} : o.controllers;
    const std::string dir = output_dir(o);
    const auto results = compare_controllers(s, names);
    std::vector<RunReport> reports;
    std::vector<std::string> written;
    write_trajectory(scenario_reference(s), reference_path(dir, s));
    written.push_back(reference_path(dir, s));
    for (const auto& r : results) {
      write_run(r, s, dir, written);
      reports.push_back(r.report);
    }
    write_file(compare_path(dir, s, "csv"), compare_csv(reports));
    write_file(compare_path(dir, s, "txt"), compare_text(reports));
    written.push_back(compare_path(dir, s, "csv"));
    written.push_back(compare_path(dir, s, "txt"));
    if (!o.quiet) {
      out << compare_text(reports, true);
      for (const auto& p : written) out << "wrote " << p << '\n';
    }
    return 0;
  }
  throw std::logic_error("unhandled command " + cmd);
}

}  // namespace

int cli_main(int argc, char** argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fish growth simulator and controller benchmark"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", o.config, "Scenario file (defaults when omitted)");
    sub->add_option("--seed", seed, "Override the scenario seed");
    if (with_out) {
      sub->add_option("--out", o.out, "Output directory (default $AQUACTL_OUT or .)");
      sub->add_flag("--quiet", o.quiet, "Print nothing on success");
    }
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Run the scenario's controller and write its trajectory"},
      {"reference", "Write the reference trajectory"},
      {"train-q", "Train the tabular Q-learning agent and write the Q-table"},
      {"run-mpc", "Run the receding-horizon controller"},
      {"run-rlmpc", "Run the hybrid RL-MPC controller"},
      {"compare", "Run several controllers on one scenario and tabulate metrics"},
      {"export-defaults", "Print the full scenario file"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub, name != "export-defaults");
    subs[name] = sub;
  }
  subs["simulate"]->add_option("--controller", o.controllers, "Controller to run")->delimiter(',');
  subs["compare"]
      ->add_option("--controller", o.controllers, "Controllers (default constant,pid,mpc)")
      ->delimiter(',');
  subs["train-q"]->add_flag("--trace", o.trace, "Write the training trace");
  subs["export-defaults"]->add_option("file", o.export_file, "Write to FILE instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) {
      cmd = name;
      if (sub->count("--seed") > 0) o.seed = seed;
    }

  try {
    return run_command(cmd, o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const SimulationError& e) {
    err << "simulation error";
    if (e.step_index() != SimulationError::npos) err << " at step " << e.step_index();
    err << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace aquactl

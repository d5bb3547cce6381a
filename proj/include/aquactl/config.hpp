#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aquactl/classical.hpp"
#include "aquactl/mpc.hpp"
#include "aquactl/qlearning.hpp"
#include "aquactl/rlmpc.hpp"
#include "aquactl/sim.hpp"

namespace aquactl {

inline const std::vector<std::string> kControllerNames = {"constant", "bangbang", "pid",
                                                          "mpc",      "qlearning", "rlmpc"};

enum class ModelForm { individual, population };

/// Environment as written in the scenario file.
struct EnvSpec {
  EnvProfile::Kind kind = EnvProfile::Kind::sinusoidal;
  std::array<ChannelWave, kChannelCount> waves{ChannelWave{29.5, 1.5, 30.0, 0.0},
                                               ChannelWave{5.0, 0.5, 7.0, 0.0},
                                               ChannelWave{0.03, 0.01, 15.0, 0.0},
                                               ChannelWave{1.0, 0.0, 365.0, 0.0}};
  std::array<double, kChannelCount> noise{0.3, 0.2, 0.005, 0.0};
  std::string table_path;  ///< CSV file for kind = table

  /// Noise is seeded from the "environment" stream of the run seed.
  EnvProfile build(std::uint64_t run_seed) const;
};

struct ConstantSettings {
  double f = 0.5;
  std::optional<double> T;  ///< unset: follow the ambient value
  std::optional<double> DO;
};

/// Everything one scenario file describes.
struct Scenario {
  std::string name = "default";
  std::string controller = "mpc";
  double f_ref = 0.6;

  double t0 = 0.0;
  double tf = 60.0;
  double dt = 1.0;
  Integrator integrator = Integrator::rk4;
  std::uint64_t seed = 7;
  ModelForm form = ModelForm::individual;
  double w0 = 50.0;
  double xi0 = 50000.0;
  std::int64_t p0 = 1000;
  StockingPolicy stocking{0, 5.0};
  bool mortality = true;

  GrowthParams params;
  EnvSpec env;

  ConstantSettings constant;
  BangBangConfig bangbang{0.0, 1.0, 0.0, 0.0};
  LoopBinding bangbang_loop;
  PidConfig pid;
  LoopBinding pid_loop;
  MpcConfig mpc;
  std::optional<std::uint64_t> mpc_seed;  ///< overrides the derived solver seed
  QLearningConfig qlearning;
  MdpSpec mdp;
  RlMpcConfig rlmpc;  ///< its mpc part is taken from the mpc section

  Scenario();

  /// Throws ConfigError with the dotted key of the first invalid entry.
  void validate() const;

  SimConfig sim_config() const;
  MpcConfig mpc_config() const;
  QLearningConfig qlearning_config() const;
  MdpSpec mdp_spec() const;
  RlMpcConfig rlmpc_config() const;
};

/// Parses scenario text. Missing keys keep their defaults; unknown sections
/// or keys and malformed values throw ConfigError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Every key of every section in a fixed order. Parsing the output and
/// exporting again gives identical bytes.
std::string export_scenario(const Scenario& s);

}  // namespace aquactl

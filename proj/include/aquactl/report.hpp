#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aquactl/sim.hpp"

namespace aquactl {

/// Metrics of one run, computed from the trajectory alone.
///
/// For a population the feed and gain are whole-pond biomass, terminal weight
/// and SGR use the mean fish.
struct RunReport {
  std::string controller;
  double terminal_weight = 0.0;
  std::optional<double> fcr;  ///< unset when there is no weight gain
  std::optional<double> sgr;
  std::optional<double> rmse;  ///< against the reference, when one is given
  double total_feed = 0.0;     ///< kcal
  std::optional<double> survival;
  std::optional<double> episode_return;  ///< sum of logged rewards
  std::optional<double> wall_clock_s;    ///< never written to CSV
};

RunReport compute_report(const Trajectory& traj, const GrowthParams& params,
                         const Reference* reference, std::string controller);

/// Root-mean-square of w(t_k) - w_ref(t_k) over all records.
double tracking_rmse(const Trajectory& traj, const Reference& reference);

/// Sum over steps of f R_frac biomass dt.
double total_feed(const Trajectory& traj, const GrowthParams& params);

std::string compare_csv(const std::vector<RunReport>& reports);
/// Column-aligned table of the same numbers; wall-clock included on request.
std::string compare_text(const std::vector<RunReport>& reports, bool wall_clock = false);

}  // namespace aquactl

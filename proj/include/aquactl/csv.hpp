#pragma once

#include <string>
#include <string_view>

#include "aquactl/qlearning.hpp"
#include "aquactl/sim.hpp"

namespace aquactl {

inline constexpr std::string_view kTrajectoryHeader =
    "t_day,w_kcal,xi_kcal,p_count,f,T_c,DO_mgL,UIA_mgL,tau,sigma,v,k1,reward,J_mpc,chosen_by";
inline constexpr std::string_view kQTableHeader = "state_bin,action_idx,q_value,visits";

/// Trajectory as CSV text. Absent values are empty fields; numbers carry 17
/// significant digits. For population rows w_kcal holds the mean weight.
std::string trajectory_csv(const Trajectory& traj);
Trajectory parse_trajectory_csv(std::string_view text);

void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

std::string qtable_csv(const QTable& table);
/// Dimensions are taken from the largest indices present.
QTable parse_qtable_csv(std::string_view text);

void write_qtable(const QTable& table, const std::string& path);
QTable read_qtable(const std::string& path);

}  // namespace aquactl

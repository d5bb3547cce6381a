#pragma once

#include <Eigen/Core>

namespace aquactl {

/// Manipulated inputs u = [f, T, DO].
struct ControlAction {
  double f = 0.0;
  double T = 33.0;
  double DO = 5.0;

  Eigen::Vector3d vec() const { return {f, T, DO}; }
  template <typename Derived>
  static ControlAction from(const Eigen::MatrixBase<Derived>& v) {
    return {v(0), v(1), v(2)};
  }
  bool operator==(const ControlAction&) const = default;
};

/// Componentwise box u_min <= u <= u_max.
struct ActionBounds {
  Eigen::Vector3d lower{0.0, 24.0, 0.0};
  Eigen::Vector3d upper{1.0, 40.0, 20.0};

  bool contains(const ControlAction& u) const {
    const Eigen::Vector3d x = u.vec();
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
  ControlAction clamp(const ControlAction& u) const {
    return ControlAction::from(u.vec().cwiseMax(lower).cwiseMin(upper));
  }
  bool valid() const { return (lower.array() <= upper.array()).all(); }
};

}  // namespace aquactl

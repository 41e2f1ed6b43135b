// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>

namespace calib {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Transform = Eigen::Matrix4d;

inline constexpr int kNumLinks = 6;

/// Denavit-Hartenberg parameters of one link. Lengths in mm, angles in rad.
struct DHLink {
  double a = 0.0;
  double d = 0.0;
  double alpha = 0.0;
  double theta_offset = 0.0;
};

/// Six-link serial robot plus the fixed cable anchor point (mm).
struct RobotModel {
  std::array<DHLink, kNumLinks> links{};
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
};

/// Actuated joint angles (rad). The effective angle of link i is
/// q[i] + links[i].theta_offset.
struct JointConfig {
  Vector6d q = Vector6d::Zero();
};

/// Homogeneous transform between adjacent link frames.
Transform link_transform(const DHLink& link, double q);

/// Base-to-end transform, the ordered product of the six link transforms.
Transform forward_kinematics(const RobotModel& model, const JointConfig& joints);

/// Translation part of the base-to-end transform (mm).
Eigen::Vector3d end_position(const RobotModel& model, const JointConfig& joints);

/// Euclidean distance from the cable anchor to the end-effector (mm).
double cable_length(const RobotModel& model, const JointConfig& joints);

/// Reads a robot model from JSON: {"links": [{"a_mm","d_mm","alpha_rad",
/// "theta_offset_rad"} x6], "anchor_mm": [x,y,z]}.
RobotModel load_robot_model(const std::string& path);
void save_robot_model(const RobotModel& model, const std::string& path);

}  // namespace calib

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "calib/kinematics.hpp"
#include "calib/measurement.hpp"

namespace calib {

/// Execution policy for the batched kernels. Parallel uses OpenMP when the
/// build has it and must produce bit-identical results to Serial: every
/// output entry is computed independently and reductions run in a fixed
/// serial order.
enum class Exec {
  Serial,
  Parallel,
};

namespace batch {

/// Cable length of one fixed model at every configuration.
void cable_lengths_serial(const RobotModel& model,
                          const std::vector<Measurement>& points,
                          Eigen::VectorXd& out);
void cable_lengths_parallel(const RobotModel& model,
                            const std::vector<Measurement>& points,
                            Eigen::VectorXd& out);

/// Central-difference Jacobian assembly. `plus` and `minus` hold one
/// perturbed model per column, `inv_two_h` the per-column 1/(2h).
void jacobian_serial(const std::vector<RobotModel>& plus,
                     const std::vector<RobotModel>& minus,
                     const std::vector<double>& inv_two_h,
                     const std::vector<Measurement>& points,
                     Eigen::MatrixXd& out);
void jacobian_parallel(const std::vector<RobotModel>& plus,
                       const std::vector<RobotModel>& minus,
                       const std::vector<double>& inv_two_h,
                       const std::vector<Measurement>& points,
                       Eigen::MatrixXd& out);

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

/// Applies a scalar map to every point. `fn` must be safe to call from
/// multiple threads at once.
void map_points_serial(const std::vector<Eigen::VectorXd>& points,
                       const ScalarFn& fn, Eigen::VectorXd& out);
void map_points_parallel(const std::vector<Eigen::VectorXd>& points,
                         const ScalarFn& fn, Eigen::VectorXd& out);

}  // namespace batch
}  // namespace calib

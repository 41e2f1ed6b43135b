// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "calib/batch.hpp"
#include "calib/kinematics.hpp"
#include "calib/measurement.hpp"

namespace calib {

inline constexpr int kNumParams = 4 * kNumLinks;

/// Kinematic-parameter deviation vector, ordered
/// [da1..da6 | dd1..dd6 | dalpha1..dalpha6 | dtheta1..dtheta6].
/// da/dd in mm, dalpha/dtheta in rad.
using ParamDeviation = Eigen::Matrix<double, kNumParams, 1>;

using ResidualVector = Eigen::VectorXd;
using IdentificationJacobian = Eigen::MatrixXd;

inline constexpr int kOffsetA = 0;
inline constexpr int kOffsetD = kNumLinks;
inline constexpr int kOffsetAlpha = 2 * kNumLinks;
inline constexpr int kOffsetTheta = 3 * kNumLinks;

/// Central-difference step per parameter block: mm-valued parameters use
/// kFdStepLength, rad-valued ones kFdStepAngle.
inline constexpr double kFdStepLength = 1e-6;
inline constexpr double kFdStepAngle = 1e-7;

inline double fd_step(int param_index) {
  return param_index < kOffsetAlpha ? kFdStepLength : kFdStepAngle;
}

/// Returns a copy of `model` with the deviation added onto each link's
/// DH parameters. The input is not modified.
RobotModel apply_deviation(const RobotModel& model, const ParamDeviation& x);

/// Residuals e_i = z_measured_i - cable_length(apply_deviation(model, x), q_i).
ResidualVector residuals(const RobotModel& model, const ParamDeviation& x,
                         const MeasurementSet& data,
                         Exec exec = Exec::Parallel);

/// Mean of squared residuals (mm^2).
double objective(const RobotModel& model, const ParamDeviation& x,
                 const MeasurementSet& data, Exec exec = Exec::Parallel);

/// m x 24 sensitivity matrix of the modeled cable length to each parameter,
/// by central finite differences about x. Row i corresponds to data point i.
/// The residual linearizes as e(x + dx) ~ e(x) - J dx.
IdentificationJacobian identification_jacobian(const RobotModel& model,
                                               const ParamDeviation& x,
                                               const MeasurementSet& data,
                                               Exec exec = Exec::Parallel);

}  // namespace calib

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "calib/batch.hpp"
#include "calib/measurement.hpp"
#include "calib/solvers.hpp"

namespace calib {

struct UkfConfig {
  double alpha = 1e-3;      ///< sigma-point spread
  double beta = 2.0;        ///< prior-distribution weighting
  double kappa = 0.0;       ///< secondary scaling
  double q_process = 1e-10; ///< process-noise scale added per predict (units^2)
  double r_meas = 0.01;     ///< measurement-noise variance (mm^2)
  double p0 = 1e-4;         ///< initial covariance scale (units^2)
  int epochs = 1;           ///< passes over the dataset in ukf_calibrate
};

/// Filter state: mean and covariance over the parameter vector. The
/// covariance is kept symmetric; dimension is fixed by construction.
struct UkfState {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
};

/// 2N+1 scaled sigma points with mean and covariance weights.
struct SigmaSet {
  std::vector<Eigen::VectorXd> points;
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

/// Scalar-observation statistics propagated through the sigma points.
struct Observation {
  double y_hat = 0.0;            ///< predicted measurement (mm)
  double s = 0.0;                ///< innovation variance (mm^2)
  Eigen::VectorXd p_xy;          ///< state-measurement cross covariance
};

/// Builds the scaled sigma set about state.x. The matrix square root is a
/// Cholesky factor; on failure the diagonal is jittered in decade steps
/// from 1e-12 up to 1e-6 before giving up with NumericError.
SigmaSet sigma_points(const UkfState& state, const UkfConfig& cfg);

/// Time update with an identity process model plus q_process * I.
UkfState predict(const UkfState& state, const UkfConfig& cfg);

/// Measurement update statistics for an arbitrary scalar map. `h` must be
/// safe to call concurrently.
Observation observe(const UkfState& predicted, const batch::ScalarFn& h,
                    const UkfConfig& cfg, Exec exec = Exec::Parallel);

/// Cable-length observation of the robot at one joint configuration.
Observation observe(const UkfState& predicted, const RobotModel& model,
                    const JointConfig& joints, const UkfConfig& cfg,
                    Exec exec = Exec::Parallel);

/// Kalman update from a scalar measurement. The covariance is symmetrized.
UkfState update(const UkfState& predicted, double y_measured,
                const Observation& obs);

/// Runs the filter over the dataset, scalar-sequential in dataset order,
/// starting from x = 0 and P = p0 * I. rmse_history holds the full-dataset
/// RMSE after each processed measurement; x_hat is the final mean.
SolveReport ukf_calibrate(const RobotModel& model, const MeasurementSet& data,
                          const UkfConfig& cfg, Exec exec = Exec::Parallel);

/// Two-stage run: one ukf_calibrate pass, then the variable-step solver
/// started from the filter mean. Histories are concatenated and
/// stage_boundary marks where the second stage begins.
SolveReport ukf_slm_calibrate(const RobotModel& model,
                              const MeasurementSet& data,
                              const UkfConfig& ucfg, const SolverConfig& scfg,
                              Exec exec = Exec::Parallel);

}  // namespace calib

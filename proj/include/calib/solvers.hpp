// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "calib/error_model.hpp"
#include "calib/measurement.hpp"

namespace calib {

struct SolverConfig {
  double lambda = 0.01;  ///< damping added to the normal-equation diagonal
  double delta0 = 1.0;   ///< initial step size (variable-step method only)
  double mu = 0.95;      ///< geometric step decay, in (0,1); 1 degenerates to lm
  int max_iter = 200;
  double tol = 1e-9;     ///< stop when |RMSE_t - RMSE_{t-1}| falls below (mm)
};

struct SolveReport {
  ParamDeviation x_hat = ParamDeviation::Zero();
  std::vector<double> rmse_history;  ///< mm; length = iterations + 1
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
  /// Index into rmse_history where the second stage of a two-stage run
  /// begins; unset for single-stage runs.
  std::optional<std::size_t> stage_boundary;
};

/// Undamped normal-equation solve (J^T J)^-1 J^T e. Throws
/// SingularMatrixError when the condition number estimate of J^T J
/// exceeds 1e12; the damped lm_step handles those systems.
Eigen::VectorXd least_squares_step(const Eigen::MatrixXd& j,
                                   const Eigen::VectorXd& e);

/// Damped solve (J^T J + lambda I)^-1 J^T e; well-defined for lambda > 0.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& e,
                        double lambda);

/// Step-size schedule delta_t = delta0 * mu^t, evaluated by the same
/// geometric recurrence the variable-step solver applies.
std::vector<double> slm_schedule(double delta0, double mu, int n);

/// Damped iteration x <- x + lm_step(J(x), E(x), lambda) from x = 0.
SolveReport lm_solve(const RobotModel& model, const MeasurementSet& data,
                     const SolverConfig& cfg, Exec exec = Exec::Parallel);

/// Variable-step damped iteration x <- x + delta_t * lm_step(...), with
/// delta decaying geometrically by cfg.mu. Starts at x0 (default zero).
SolveReport slm_solve(const RobotModel& model, const MeasurementSet& data,
                      const SolverConfig& cfg, Exec exec = Exec::Parallel,
                      const ParamDeviation& x0 = ParamDeviation::Zero());

}  // namespace calib

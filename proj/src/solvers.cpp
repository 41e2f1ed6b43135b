// SPDX-License-Identifier: Apache-2.0
#include "calib/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "calib/errors.hpp"
#include "calib/metrics.hpp"

namespace calib {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr int kMaxConsecutiveRises = 10;

void validate_config(const SolverConfig& cfg, bool variable_step) {
  if (!(cfg.lambda >= 0.0)) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (!(cfg.tol > 0.0)) {
    throw std::invalid_argument("tol must be > 0");
  }
  if (cfg.max_iter < 1) {
    throw std::invalid_argument("max_iter must be >= 1");
  }
  if (variable_step) {
    if (!(cfg.delta0 > 0.0)) {
      throw std::invalid_argument("delta0 must be > 0");
    }
    // mu = 1 is allowed and degenerates to the fixed-step iteration.
    if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) {
      throw std::invalid_argument("mu must lie in (0, 1]");
    }
  }
}

SolveReport iterate(const RobotModel& model, const MeasurementSet& data,
                    const SolverConfig& cfg, bool variable_step,
                    const ParamDeviation& x0, Exec exec) {
  validate_config(cfg, variable_step);
  const auto t_start = std::chrono::steady_clock::now();

  SolveReport report;
  ParamDeviation x = x0;
  ResidualVector e = residuals(model, x, data, exec);
  double rmse = evaluate(e).rmse;
  report.rmse_history.push_back(rmse);

  if (rmse <= cfg.tol) {
    report.converged = true;
  } else {
    const std::vector<double> schedule =
        variable_step ? slm_schedule(cfg.delta0, cfg.mu, cfg.max_iter)
                      : std::vector<double>{};
    int rises = 0;
    for (int t = 1; t <= cfg.max_iter; ++t) {
      const IdentificationJacobian j = identification_jacobian(model, x, data, exec);
      const Eigen::VectorXd step = lm_step(j, e, cfg.lambda);
      const double scale = variable_step ? schedule[static_cast<std::size_t>(t - 1)] : 1.0;
      x += scale * step;
      e = residuals(model, x, data, exec);
      const double next = evaluate(e).rmse;
      report.rmse_history.push_back(next);
      report.iterations = t;
      if (std::abs(next - rmse) < cfg.tol) {
        report.converged = true;
        rmse = next;
        break;
      }
      rises = next > rmse ? rises + 1 : 0;
      rmse = next;
      if (rises >= kMaxConsecutiveRises) {
        report.converged = false;
        break;
      }
    }
  }

  report.x_hat = x;
  const auto t_end = std::chrono::steady_clock::now();
  report.wall_time_s = std::chrono::duration<double>(t_end - t_start).count();
  return report;
}

}  // namespace

Eigen::VectorXd least_squares_step(const Eigen::MatrixXd& j,
                                   const Eigen::VectorXd& e) {
  if (j.rows() != e.size()) {
    throw std::invalid_argument("Jacobian row count does not match residual size");
  }
  const Eigen::MatrixXd normal = j.transpose() * j;
  const Eigen::VectorXd rhs = j.transpose() * e;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= 0.0 || hi / lo > kConditionLimit) {
    std::ostringstream msg;
    msg << "normal equations are singular or ill-conditioned (cond ~ "
        << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())
        << "); the undamped solve is unreliable here, use the damped lm method";
    throw SingularMatrixError(msg.str());
  }
  return normal.ldlt().solve(rhs);
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& e,
                        double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (lambda == 0.0) {
    return least_squares_step(j, e);
  }
  if (j.rows() != e.size()) {
    throw std::invalid_argument("Jacobian row count does not match residual size");
  }
  Eigen::MatrixXd damped = j.transpose() * j;
  damped.diagonal().array() += lambda;
  return damped.ldlt().solve(j.transpose() * e);
}

std::vector<double> slm_schedule(double delta0, double mu, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n > 0 ? n : 0));
  double delta = delta0;
  for (int t = 0; t < n; ++t) {
    out.push_back(delta);
    delta *= mu;
  }
  return out;
}

SolveReport lm_solve(const RobotModel& model, const MeasurementSet& data,
                     const SolverConfig& cfg, Exec exec) {
  return iterate(model, data, cfg, /*variable_step=*/false,
                 ParamDeviation::Zero(), exec);
}

SolveReport slm_solve(const RobotModel& model, const MeasurementSet& data,
                      const SolverConfig& cfg, Exec exec,
                      const ParamDeviation& x0) {
  return iterate(model, data, cfg, /*variable_step=*/true, x0, exec);
}

}  // namespace calib

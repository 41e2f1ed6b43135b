// SPDX-License-Identifier: Apache-2.0
#include "calib/ukf.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "calib/error_model.hpp"
#include "calib/errors.hpp"
#include "calib/metrics.hpp"

namespace calib {

namespace {

void validate_config(const UkfConfig& cfg) {
  if (!(cfg.alpha > 0.0)) {
    throw std::invalid_argument("ukf alpha must be > 0");
  }
  if (!(cfg.r_meas > 0.0)) {
    throw std::invalid_argument("ukf r_meas must be > 0");
  }
  if (!(cfg.p0 > 0.0)) {
    throw std::invalid_argument("ukf p0 must be > 0");
  }
  if (!(cfg.q_process >= 0.0)) {
    throw std::invalid_argument("ukf q_process must be >= 0");
  }
  if (cfg.epochs < 1) {
    throw std::invalid_argument("ukf epochs must be >= 1");
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& p) {
  return 0.5 * (p + p.transpose());
}

/// Lower Cholesky factor of `m`, escalating a diagonal jitter from 1e-12
/// to 1e-6 in decade steps when the plain factorization fails.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  for (double jitter = 1e-12; jitter <= 1e-6; jitter *= 10.0) {
    Eigen::MatrixXd bumped = m;
    bumped.diagonal().array() += jitter;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw NumericError("state covariance is not factorizable even with jitter");
}

}  // namespace

SigmaSet sigma_points(const UkfState& state, const UkfConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index n = state.x.size();
  if (n < 1 || state.p.rows() != n || state.p.cols() != n) {
    throw std::invalid_argument("state mean/covariance dimensions disagree");
  }
  const double nd = static_cast<double>(n);
  const double lambda_s = cfg.alpha * cfg.alpha * (nd + cfg.kappa) - nd;
  const double scale = nd + lambda_s;
  if (!(scale > 0.0)) {
    throw std::invalid_argument("alpha/kappa give a non-positive sigma scale");
  }

  const Eigen::MatrixXd root = cholesky_with_jitter(scale * state.p);

  SigmaSet set;
  set.points.reserve(static_cast<std::size_t>(2 * n + 1));
  set.points.push_back(state.x);
  for (Eigen::Index i = 0; i < n; ++i) {
    set.points.push_back(state.x + root.col(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    set.points.push_back(state.x - root.col(i));
  }

  set.wm.resize(2 * n + 1);
  set.wc.resize(2 * n + 1);
  set.wm[0] = lambda_s / scale;
  set.wc[0] = set.wm[0] + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
  const double w = 1.0 / (2.0 * scale);
  for (Eigen::Index i = 1; i <= 2 * n; ++i) {
    set.wm[i] = w;
    set.wc[i] = w;
  }
  return set;
}

UkfState predict(const UkfState& state, const UkfConfig& cfg) {
  const SigmaSet set = sigma_points(state, cfg);
  const Eigen::Index n = state.x.size();

  // Static parameters: the process map is the identity, so the sigma points
  // pass through unchanged and only reconstruction plus Q remains.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    mean += set.wm[static_cast<Eigen::Index>(i)] * set.points[i];
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const Eigen::VectorXd d = set.points[i] - mean;
    cov += set.wc[static_cast<Eigen::Index>(i)] * (d * d.transpose());
  }
  cov.diagonal().array() += cfg.q_process;
  return UkfState{mean, symmetrized(cov)};
}

Observation observe(const UkfState& predicted, const batch::ScalarFn& h,
                    const UkfConfig& cfg, Exec exec) {
  const SigmaSet set = sigma_points(predicted, cfg);

  Eigen::VectorXd y;
  if (exec == Exec::Parallel) {
    batch::map_points_parallel(set.points, h, y);
  } else {
    batch::map_points_serial(set.points, h, y);
  }
  if (!y.allFinite()) {
    throw NumericError("measurement map returned a non-finite value");
  }

  Observation obs;
  obs.y_hat = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    obs.y_hat += set.wm[i] * y[i];
  }
  obs.s = cfg.r_meas;
  obs.p_xy = Eigen::VectorXd::Zero(predicted.x.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double dy = y[i] - obs.y_hat;
    obs.s += set.wc[i] * dy * dy;
    obs.p_xy += set.wc[i] * dy *
                (set.points[static_cast<std::size_t>(i)] - predicted.x);
  }
  return obs;
}

Observation observe(const UkfState& predicted, const RobotModel& model,
                    const JointConfig& joints, const UkfConfig& cfg,
                    Exec exec) {
  if (predicted.x.size() != kNumParams) {
    throw std::invalid_argument("robot observation needs a 24-dim state");
  }
  const batch::ScalarFn h = [&model, &joints](const Eigen::VectorXd& x) {
    return cable_length(apply_deviation(model, ParamDeviation(x)), joints);
  };
  return observe(predicted, h, cfg, exec);
}

UkfState update(const UkfState& predicted, double y_measured,
                const Observation& obs) {
  if (!(obs.s > 0.0)) {
    throw NumericError("innovation variance must be positive");
  }
  const Eigen::VectorXd gain = obs.p_xy / obs.s;
  UkfState next;
  next.x = predicted.x + gain * (y_measured - obs.y_hat);
  next.p = symmetrized(predicted.p - obs.s * (gain * gain.transpose()));
  return next;
}

SolveReport ukf_calibrate(const RobotModel& model, const MeasurementSet& data,
                          const UkfConfig& cfg, Exec exec) {
  validate_config(cfg);
  if (data.points.empty()) {
    throw std::invalid_argument("measurement set is empty");
  }
  const auto t_start = std::chrono::steady_clock::now();

  UkfState state{Eigen::VectorXd::Zero(kNumParams),
                 cfg.p0 * Eigen::MatrixXd::Identity(kNumParams, kNumParams)};

  SolveReport report;
  report.rmse_history.push_back(
      evaluate(residuals(model, ParamDeviation(state.x), data, exec)).rmse);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const Measurement& point : data.points) {
      const UkfState pred = predict(state, cfg);
      const Observation obs = observe(pred, model, point.joints, cfg, exec);
      state = update(pred, point.z, obs);
      report.rmse_history.push_back(
          evaluate(residuals(model, ParamDeviation(state.x), data, exec)).rmse);
      ++report.iterations;
    }
  }

  report.x_hat = ParamDeviation(state.x);
  report.converged = true;
  const auto t_end = std::chrono::steady_clock::now();
  report.wall_time_s = std::chrono::duration<double>(t_end - t_start).count();
  return report;
}

SolveReport ukf_slm_calibrate(const RobotModel& model,
                              const MeasurementSet& data,
                              const UkfConfig& ucfg, const SolverConfig& scfg,
                              Exec exec) {
  SolveReport first = ukf_calibrate(model, data, ucfg, exec);
  const SolveReport second = slm_solve(model, data, scfg, exec, first.x_hat);

  SolveReport combined;
  combined.x_hat = second.x_hat;
  combined.rmse_history = first.rmse_history;
  combined.stage_boundary = first.rmse_history.size() - 1;
  // The second stage's entry 0 re-measures the filter mean; skip the
  // duplicate so history length stays iterations + 1.
  combined.rmse_history.insert(combined.rmse_history.end(),
                               second.rmse_history.begin() + 1,
                               second.rmse_history.end());
  combined.iterations = first.iterations + second.iterations;
  combined.converged = second.converged;
  combined.wall_time_s = first.wall_time_s + second.wall_time_s;
  return combined;
}

}  // namespace calib

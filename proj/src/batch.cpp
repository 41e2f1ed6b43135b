// SPDX-License-Identifier: Apache-2.0
#include "calib/batch.hpp"

namespace calib::batch {

void cable_lengths_serial(const RobotModel& model,
                          const std::vector<Measurement>& points,
                          Eigen::VectorXd& out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(points.size());
  out.resize(m);
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    out[i] = cable_length(model, points[i].joints);
  }
}

void cable_lengths_parallel(const RobotModel& model,
                            const std::vector<Measurement>& points,
                            Eigen::VectorXd& out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(points.size());
  out.resize(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    out[i] = cable_length(model, points[i].joints);
  }
}

void jacobian_serial(const std::vector<RobotModel>& plus,
                     const std::vector<RobotModel>& minus,
                     const std::vector<double>& inv_two_h,
                     const std::vector<Measurement>& points,
                     Eigen::MatrixXd& out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(points.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(plus.size());
  out.resize(m, n);
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      out(i, k) = (cable_length(plus[k], points[i].joints) -
                   cable_length(minus[k], points[i].joints)) *
                  inv_two_h[k];
    }
  }
}

void jacobian_parallel(const std::vector<RobotModel>& plus,
                       const std::vector<RobotModel>& minus,
                       const std::vector<double>& inv_two_h,
                       const std::vector<Measurement>& points,
                       Eigen::MatrixXd& out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(points.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(plus.size());
  out.resize(m, n);
  // Every (i, k) entry is independent; identical arithmetic to the serial
  // kernel, so the result is bit-equal under any schedule.
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      out(i, k) = (cable_length(plus[k], points[i].joints) -
                   cable_length(minus[k], points[i].joints)) *
                  inv_two_h[k];
    }
  }
}

void map_points_serial(const std::vector<Eigen::VectorXd>& points,
                       const ScalarFn& fn, Eigen::VectorXd& out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  out.resize(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = fn(points[i]);
  }
}

void map_points_parallel(const std::vector<Eigen::VectorXd>& points,
                         const ScalarFn& fn, Eigen::VectorXd& out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  out.resize(n);
  // Sigma sets are small (2N+1 points); below this the fork/join overhead
  // costs more than the loop body. The values are identical either way.
#pragma omp parallel for schedule(static) if (n >= 128)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = fn(points[i]);
  }
}

}  // namespace calib::batch

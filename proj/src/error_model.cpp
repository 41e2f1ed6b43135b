// SPDX-License-Identifier: Apache-2.0
#include "calib/error_model.hpp"

#include <stdexcept>

#include "calib/errors.hpp"

namespace calib {

namespace {

void require_nonempty(const MeasurementSet& data) {
  if (data.points.empty()) {
    throw std::invalid_argument("measurement set is empty");
  }
}

}  // namespace

RobotModel apply_deviation(const RobotModel& model, const ParamDeviation& x) {
  if (!x.allFinite()) {
    throw std::invalid_argument("parameter deviation contains a non-finite value");
  }
  RobotModel out = model;
  for (int i = 0; i < kNumLinks; ++i) {
    out.links[i].a += x[kOffsetA + i];
    out.links[i].d += x[kOffsetD + i];
    out.links[i].alpha += x[kOffsetAlpha + i];
    out.links[i].theta_offset += x[kOffsetTheta + i];
  }
  return out;
}

ResidualVector residuals(const RobotModel& model, const ParamDeviation& x,
                         const MeasurementSet& data, Exec exec) {
  require_nonempty(data);
  const RobotModel perturbed = apply_deviation(model, x);
  Eigen::VectorXd nominal;
  if (exec == Exec::Parallel) {
    batch::cable_lengths_parallel(perturbed, data.points, nominal);
  } else {
    batch::cable_lengths_serial(perturbed, data.points, nominal);
  }
  ResidualVector e(nominal.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    e[i] = data.points[static_cast<std::size_t>(i)].z - nominal[i];
  }
  return e;
}

double objective(const RobotModel& model, const ParamDeviation& x,
                 const MeasurementSet& data, Exec exec) {
  const ResidualVector e = residuals(model, x, data, exec);
  return e.squaredNorm() / static_cast<double>(e.size());
}

IdentificationJacobian identification_jacobian(const RobotModel& model,
                                               const ParamDeviation& x,
                                               const MeasurementSet& data,
                                               Exec exec) {
  require_nonempty(data);
  std::vector<RobotModel> plus;
  std::vector<RobotModel> minus;
  std::vector<double> inv_two_h;
  plus.reserve(kNumParams);
  minus.reserve(kNumParams);
  inv_two_h.reserve(kNumParams);
  for (int k = 0; k < kNumParams; ++k) {
    const double h = fd_step(k);
    ParamDeviation bumped = x;
    bumped[k] = x[k] + h;
    plus.push_back(apply_deviation(model, bumped));
    bumped[k] = x[k] - h;
    minus.push_back(apply_deviation(model, bumped));
    inv_two_h.push_back(1.0 / (2.0 * h));
  }

  IdentificationJacobian j;
  if (exec == Exec::Parallel) {
    batch::jacobian_parallel(plus, minus, inv_two_h, data.points, j);
  } else {
    batch::jacobian_serial(plus, minus, inv_two_h, data.points, j);
  }
  if (!j.allFinite()) {
    throw NumericError("identification Jacobian contains a non-finite entry");
  }
  return j;
}

}  // namespace calib

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "calib/kinematics.hpp"

namespace calib {

/// One joint configuration paired with the measured cable length (mm).
struct Measurement {
  JointConfig joints;
  double z = 0.0;
};

struct MeasurementSet {
  std::vector<Measurement> points;
  std::string provenance;

  std::size_t size() const { return points.size(); }
};

}  // namespace calib

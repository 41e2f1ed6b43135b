// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "calib/error_model.hpp"
#include "calib/kinematics.hpp"
#include "calib/measurement.hpp"

namespace calib {

/// Canonical measurement CSV header. LF line endings, UTF-8, plain
/// decimal-point floats, no comments.
inline constexpr const char* kCsvHeader =
    "q1_rad,q2_rad,q3_rad,q4_rad,q5_rad,q6_rad,z_mm";

struct JointRange {
  double lo = -1.5707963267948966;
  double hi = 1.5707963267948966;
};

/// Ground-truth recipe for a synthetic dataset: perturb the nominal model
/// by x_true, sample joint configurations uniformly in joint_ranges, and
/// add Gaussian noise of noise_std (mm) to each cable length.
struct SyntheticScenario {
  RobotModel nominal;
  ParamDeviation x_true = ParamDeviation::Zero();
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  int n_points = 1;
  std::array<JointRange, kNumLinks> joint_ranges{};
};

MeasurementSet load_measurements(const std::string& path);
void save_measurements(const MeasurementSet& set, const std::string& path);

/// Deterministic in the scenario (seed included). Returns the dataset and
/// echoes the generating deviation.
std::pair<MeasurementSet, ParamDeviation> synthesize(
    const SyntheticScenario& scenario);

/// Reads a scenario from JSON: {"nominal_model": <model JSON>, "x_true":
/// [24], "noise_std_mm", "seed", "n_points", "joint_ranges_rad": [[lo,hi] x6]}.
/// x_true, noise_std_mm, seed and joint_ranges_rad are optional.
SyntheticScenario load_scenario(const std::string& path);
void save_scenario(const SyntheticScenario& scenario, const std::string& path);

}  // namespace calib

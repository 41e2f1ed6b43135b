// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "calib/data.hpp"
#include "calib/kinematics.hpp"
#include "calib/rng.hpp"

namespace calib::test {

// Synthetic 6R geometry without parallel consecutive z-axes, so the only
// unobservable direction is the final-link twist. Workspace sits well away
// from the anchor, keeping all cable lengths positive.
inline RobotModel bench_model() {
  RobotModel m;
  const double half_pi = 1.5707963267948966;
  m.links[0] = {30.0, 300.0, -half_pi, 0.0};
  m.links[1] = {250.0, 0.0, 0.6, -half_pi};
  m.links[2] = {80.0, 0.0, -half_pi, 0.0};
  m.links[3] = {0.0, 280.0, half_pi, 0.0};
  m.links[4] = {0.0, 0.0, -half_pi, 0.0};
  m.links[5] = {40.0, 90.0, 0.0, 0.0};
  m.anchor = Eigen::Vector3d(620.0, 410.0, 60.0);
  return m;
}

/// Deviation drawn uniformly from +-0.5 mm (lengths) and +-0.005 rad (angles).
inline ParamDeviation random_deviation(Rng& rng, double len_scale = 0.5,
                                       double ang_scale = 0.005) {
  ParamDeviation x;
  for (int i = 0; i < 2 * kNumLinks; ++i) {
    x[i] = rng.uniform(-len_scale, len_scale);
  }
  for (int i = 2 * kNumLinks; i < kNumParams; ++i) {
    x[i] = rng.uniform(-ang_scale, ang_scale);
  }
  return x;
}

inline RobotModel random_model(Rng& rng) {
  RobotModel m;
  for (int i = 0; i < kNumLinks; ++i) {
    m.links[i].a = rng.uniform(-200.0, 200.0);
    m.links[i].d = rng.uniform(-200.0, 200.0);
    m.links[i].alpha = rng.uniform(-2.0, 2.0);
    m.links[i].theta_offset = rng.uniform(-2.0, 2.0);
  }
  m.anchor = Eigen::Vector3d(rng.uniform(-500.0, 500.0),
                             rng.uniform(-500.0, 500.0),
                             rng.uniform(-500.0, 500.0));
  return m;
}

inline JointConfig random_config(Rng& rng) {
  JointConfig q;
  for (int i = 0; i < kNumLinks; ++i) {
    q.q[i] = rng.uniform(-1.5707963267948966, 1.5707963267948966);
  }
  return q;
}

/// Standard 120-point scenario on the bench model; x_true drawn from the
/// given seed, matching the solver acceptance setup.
inline SyntheticScenario bench_scenario(std::uint64_t seed, double noise_std,
                                        int n_points = 120) {
  SyntheticScenario sc;
  sc.nominal = bench_model();
  sc.n_points = n_points;
  sc.seed = seed;
  sc.noise_std = noise_std;
  Rng rng(seed * 7919 + 17);
  sc.x_true = random_deviation(rng);
  return sc;
}

}  // namespace calib::test

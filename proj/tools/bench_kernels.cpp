// SPDX-License-Identifier: Apache-2.0
//
// Times the serial reference kernels against the OpenMP ones on a synthetic
// workload and prints a small speedup table.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "calib/batch.hpp"
#include "calib/data.hpp"
#include "calib/rng.hpp"
#include "calib/error_model.hpp"
#include "calib/ukf.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

calib::RobotModel bench_model() {
  calib::RobotModel model;
  const double half_pi = 1.5707963267948966;
  model.links[0] = {30.0, 300.0, -half_pi, 0.0};
  model.links[1] = {250.0, 0.0, 0.6, -half_pi};
  model.links[2] = {80.0, 0.0, -half_pi, 0.0};
  model.links[3] = {0.0, 280.0, half_pi, 0.0};
  model.links[4] = {0.0, 0.0, -half_pi, 0.0};
  model.links[5] = {40.0, 90.0, 0.0, 0.0};
  model.anchor = Eigen::Vector3d(620.0, 410.0, 60.0);
  return model;
}

double time_best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-22s %10.3f ms %10.3f ms %8.2fx\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  int n_points = 2000;
  if (argc > 1) {
    n_points = std::atoi(argv[1]);
  }

  calib::SyntheticScenario scenario;
  scenario.nominal = bench_model();
  scenario.n_points = n_points;
  scenario.seed = 7;
  auto [data, x_true] = calib::synthesize(scenario);

#ifdef _OPENMP
  std::printf("points: %d, omp threads: %d\n", n_points, omp_get_max_threads());
#else
  std::printf("points: %d, built without OpenMP\n", n_points);
#endif
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  const calib::ParamDeviation x = calib::ParamDeviation::Zero();

  {
    const double ts = time_best_of(5, [&] {
      (void)calib::residuals(scenario.nominal, x, data, calib::Exec::Serial);
    });
    const double tp = time_best_of(5, [&] {
      (void)calib::residuals(scenario.nominal, x, data, calib::Exec::Parallel);
    });
    report("residual batch", ts, tp);
  }

  {
    const double ts = time_best_of(3, [&] {
      (void)calib::identification_jacobian(scenario.nominal, x, data,
                                           calib::Exec::Serial);
    });
    const double tp = time_best_of(3, [&] {
      (void)calib::identification_jacobian(scenario.nominal, x, data,
                                           calib::Exec::Parallel);
    });
    report("jacobian assembly", ts, tp);
  }

  {
    // Point-map kernel at a batch size where the parallel path engages
    // (robot sigma sets are 49 points and stay serial by design).
    std::vector<Eigen::VectorXd> points;
    calib::Rng rng(13);
    for (int i = 0; i < 20000; ++i) {
      Eigen::VectorXd v(calib::kNumParams);
      for (int j = 0; j < calib::kNumParams; ++j) {
        v[j] = rng.uniform(-0.01, 0.01);
      }
      points.push_back(v);
    }
    calib::JointConfig pose;
    const calib::batch::ScalarFn fn = [&](const Eigen::VectorXd& v) {
      return calib::cable_length(
          calib::apply_deviation(scenario.nominal, calib::ParamDeviation(v)),
          pose);
    };
    Eigen::VectorXd out;
    const double ts = time_best_of(3, [&] {
      calib::batch::map_points_serial(points, fn, out);
    });
    const double tp = time_best_of(3, [&] {
      calib::batch::map_points_parallel(points, fn, out);
    });
    report("point map (20k)", ts, tp);
  }

  return 0;
}

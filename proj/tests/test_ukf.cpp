// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "calib/data.hpp"
#include "calib/errors.hpp"
#include "calib/metrics.hpp"
#include "calib/ukf.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace calib;

namespace {

Eigen::MatrixXd random_spd(Rng& rng, int n, double scale) {
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      a(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  Eigen::MatrixXd p = a * a.transpose() * scale;
  p.diagonal().array() += 0.1 * scale;
  return p;
}

double min_eigenvalue(const Eigen::MatrixXd& p) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("sigma_points classic spread") {
  // alpha = 1, beta = 0, kappa = 3 - N gives the sqrt(3)-per-axis layout
  const int n = kNumParams;
  UkfConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  cfg.kappa = 3.0 - n;
  UkfState state{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
  const SigmaSet set = sigma_points(state, cfg);
  REQUIRE(set.points.size() == static_cast<std::size_t>(2 * n + 1));
  CHECK(set.points[0] == state.x);
  const double spread = std::sqrt(3.0);
  for (int i = 0; i < n; ++i) {
    CHECK(set.points[static_cast<std::size_t>(1 + i)][i] ==
          doctest::Approx(spread).epsilon(1e-12));
    CHECK(set.points[static_cast<std::size_t>(1 + n + i)][i] ==
          doctest::Approx(-spread).epsilon(1e-12));
  }
  CHECK(std::abs(set.wm.sum() - 1.0) <= 1e-12);
}

TEST_CASE("sigma_points reconstruct mean and covariance") {
  // At unit-scale weights (alpha = 1) the reconstruction identities hold to
  // machine precision. At the default alpha = 1e-3 the center weight is
  // O(1e6), so plain double rounding alone limits the sum and the mean to
  // about 1e-10; the covariance bound is unaffected.
  Rng rng(3);
  UkfConfig classic_cfg;
  classic_cfg.alpha = 1.0;
  classic_cfg.beta = 0.0;
  classic_cfg.kappa = 0.0;
  const UkfConfig classic = classic_cfg;
  const UkfConfig defaults;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = kNumParams;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1.0, 1.0);
    }
    const Eigen::MatrixXd p = random_spd(rng, n, 1.0);

    for (const UkfConfig* cfg : {&classic, &defaults}) {
      const bool tight = cfg == &classic;
      const double mean_tol = tight ? 1e-12 : 2e-9;
      const SigmaSet set = sigma_points(UkfState{x, p}, *cfg);

      CHECK(std::abs(set.wm.sum() - 1.0) <= (tight ? 1e-12 : 2e-9));
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < set.points.size(); ++i) {
        mean += set.wm[static_cast<Eigen::Index>(i)] * set.points[i];
      }
      CHECK((mean - x).cwiseAbs().maxCoeff() <=
            mean_tol * (1.0 + x.cwiseAbs().maxCoeff()));

      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t i = 0; i < set.points.size(); ++i) {
        const Eigen::VectorXd d = set.points[i] - mean;
        cov += set.wc[static_cast<Eigen::Index>(i)] * (d * d.transpose());
      }
      CHECK((cov - p).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("sigma_points jitter recovery and failure") {
  const UkfConfig cfg;
  SUBCASE("rank-deficient covariance is rescued by jitter") {
    Eigen::VectorXd v(4);
    v << 1.0, 2.0, -1.0, 0.5;
    UkfState state{Eigen::VectorXd::Zero(4), v * v.transpose()};
    const SigmaSet set = sigma_points(state, cfg);
    CHECK(set.points.size() == 9);
  }
  SUBCASE("negative covariance cannot be rescued") {
    UkfState state{Eigen::VectorXd::Zero(3),
                   -Eigen::MatrixXd::Identity(3, 3)};
    CHECK_THROWS_AS(sigma_points(state, cfg), NumericError);
  }
}

TEST_CASE("predict") {
  Rng rng(7);
  UkfConfig cfg;
  const Eigen::MatrixXd p = random_spd(rng, kNumParams, 0.5);
  Eigen::VectorXd x(kNumParams);
  for (int i = 0; i < kNumParams; ++i) {
    x[i] = rng.uniform(-0.5, 0.5);
  }
  SUBCASE("no process noise leaves the state unchanged") {
    cfg.q_process = 0.0;
    const UkfState out = predict(UkfState{x, p}, cfg);
    CHECK((out.x - x).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((out.p - p).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("process noise adds to the diagonal") {
    cfg.q_process = 1e-6;
    const UkfState out = predict(UkfState{x, p}, cfg);
    Eigen::MatrixXd expected = p;
    expected.diagonal().array() += 1e-6;
    CHECK((out.p - expected).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("result stays symmetric positive semidefinite") {
    cfg.q_process = 1e-10;
    const UkfState out = predict(UkfState{x, p}, cfg);
    CHECK((out.p - out.p.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(min_eigenvalue(out.p) >=
          -1e-8 * out.p.trace() / static_cast<double>(kNumParams));
  }
}

TEST_CASE("observe") {
  Rng rng(9);
  UkfConfig cfg;
  SUBCASE("collapsed covariance reduces to a point evaluation") {
    cfg.p0 = 1e-15;
    Eigen::VectorXd x(3);
    x << 0.2, -0.1, 0.4;
    UkfState state{x, 1e-15 * Eigen::MatrixXd::Identity(3, 3)};
    const auto h = [](const Eigen::VectorXd& v) {
      return std::sin(v[0]) + v[1] * v[1] + 2.0 * v[2];
    };
    const Observation obs = observe(state, h, cfg);
    CHECK(obs.y_hat == doctest::Approx(h(x)).epsilon(1e-7));
    CHECK(obs.s == doctest::Approx(cfg.r_meas).epsilon(1e-9));
    CHECK(obs.p_xy.cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("exact for affine maps") {
    const int n = 6;
    Eigen::VectorXd c(n);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      c[i] = rng.uniform(-2.0, 2.0);
      x[i] = rng.uniform(-1.0, 1.0);
    }
    const double b = 0.7;
    const Eigen::MatrixXd p = random_spd(rng, n, 0.3);
    UkfState state{x, p};
    const auto h = [&c, b](const Eigen::VectorXd& v) { return c.dot(v) + b; };
    const Observation obs = observe(state, h, cfg);
    CHECK(obs.y_hat == doctest::Approx(c.dot(x) + b).epsilon(1e-9));
    CHECK(obs.s ==
          doctest::Approx(c.dot(p * c) + cfg.r_meas).epsilon(1e-9));
    const Eigen::VectorXd pxy_expected = p * c;
    CHECK((obs.p_xy - pxy_expected).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + pxy_expected.cwiseAbs().maxCoeff()));
  }
  SUBCASE("innovation variance never drops below the measurement noise") {
    Eigen::VectorXd x(2);
    x << 0.3, -0.2;
    UkfState state{x, random_spd(rng, 2, 1.0)};
    const auto h = [](const Eigen::VectorXd& v) { return v[0] * v[1]; };
    const Observation obs = observe(state, h, cfg);
    CHECK(obs.s >= cfg.r_meas);
  }
}

TEST_CASE("update") {
  Rng rng(15);
  const int n = 4;
  UkfConfig cfg;
  const Eigen::MatrixXd p = random_spd(rng, n, 0.4);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
  }
  const UkfState state{x, p};
  Observation obs;
  obs.y_hat = 1.3;
  obs.s = 0.5;
  obs.p_xy = Eigen::VectorXd::Ones(n) * 0.1;

  SUBCASE("zero innovation keeps the mean, shrinks the covariance") {
    const UkfState out = update(state, obs.y_hat, obs);
    CHECK(out.x == x);
    CHECK(out.p.trace() < p.trace());
  }
  SUBCASE("zero cross covariance leaves the state untouched") {
    Observation null_obs = obs;
    null_obs.p_xy.setZero();
    const UkfState out = update(state, 2.0, null_obs);
    CHECK(out.x == x);
    CHECK((out.p - p).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("enormous measurement noise suppresses the update") {
    Observation noisy = obs;
    noisy.s = 1e12;
    const UkfState out = update(state, 2.0, noisy);
    CHECK((out.x - x).norm() <= 1e-6 * noisy.p_xy.norm());
  }
  SUBCASE("non-positive innovation variance is rejected") {
    Observation bad = obs;
    bad.s = 0.0;
    CHECK_THROWS_AS(update(state, 1.0, bad), NumericError);
  }
}

TEST_CASE("ukf matches the scalar Kalman filter on a linear system") {
  // alpha = 1, kappa = 2 (classic for n = 1): the transform is exact for
  // the identity measurement map, so only roundoff separates the two.
  UkfConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  cfg.kappa = 2.0;
  cfg.q_process = 1e-4;
  cfg.r_meas = 0.04;

  UkfState state{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  double kf_x = 0.0;
  double kf_p = 1.0;
  Rng rng(21);
  const auto h = [](const Eigen::VectorXd& v) { return v[0]; };
  for (int step = 0; step < 100; ++step) {
    const double y = 0.8 + 0.2 * rng.normal();
    const UkfState pred = predict(state, cfg);
    const Observation obs = observe(pred, h, cfg, Exec::Serial);
    state = update(pred, y, obs);
    test::oracle::scalar_kf_step(kf_x, kf_p, y, cfg.q_process, cfg.r_meas);
    CHECK(std::abs(state.x[0] - kf_x) <= 1e-8);
    CHECK(std::abs(state.p(0, 0) - kf_p) <= 1e-8);
  }
}

TEST_CASE("ukf matches the vector Kalman filter on a 2-d linear system") {
  UkfConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  cfg.kappa = 1.0;
  cfg.q_process = 1e-5;
  cfg.r_meas = 0.09;

  Eigen::Vector2d c(1.0, -0.5);
  UkfState state{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  Eigen::Vector2d kf_x = Eigen::Vector2d::Zero();
  Eigen::Matrix2d kf_p = Eigen::Matrix2d::Identity();
  Rng rng(27);
  const auto h = [&c](const Eigen::VectorXd& v) { return c.dot(v); };
  for (int step = 0; step < 100; ++step) {
    const double y = 0.3 + 0.3 * rng.normal();
    const UkfState pred = predict(state, cfg);
    const Observation obs = observe(pred, h, cfg, Exec::Serial);
    state = update(pred, y, obs);

    kf_p += 1e-5 * Eigen::Matrix2d::Identity();
    const double s = c.dot(kf_p * c) + cfg.r_meas;
    const Eigen::Vector2d gain = kf_p * c / s;
    kf_x += gain * (y - c.dot(kf_x));
    kf_p = kf_p - gain * s * gain.transpose();

    CHECK((state.x - kf_x).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((state.p - kf_p).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("covariance stays symmetric PSD over many random steps") {
  Rng rng(33);
  UkfConfig cfg;
  cfg.alpha = 0.5;
  cfg.q_process = 1e-8;
  cfg.r_meas = 0.01;
  const int n = 4;
  UkfState state{Eigen::VectorXd::Zero(n), 0.5 * Eigen::MatrixXd::Identity(n, n)};
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) {
    c[i] = rng.uniform(-1.0, 1.0);
  }
  const auto h = [&c](const Eigen::VectorXd& v) { return c.dot(v) + 0.05 * v.squaredNorm(); };
  for (int step = 0; step < 1000; ++step) {
    const UkfState pred = predict(state, cfg);
    const Observation obs = observe(pred, h, cfg, Exec::Serial);
    state = update(pred, 0.2 + 0.1 * rng.normal(), obs);
    CHECK((state.p - state.p.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(min_eigenvalue(state.p) >= -1e-8 * state.p.trace() / n);
  }
}

TEST_CASE("ukf_calibrate") {
  SUBCASE("zero-noise data from the nominal model stays at zero") {
    SyntheticScenario sc;
    sc.nominal = test::bench_model();
    sc.n_points = 40;
    sc.seed = 5;
    const auto [data, x_true] = synthesize(sc);
    UkfConfig cfg;
    cfg.q_process = 0.0;
    // tight prior: the measurement map is curved, so a wide sigma spread
    // feeds a small transform bias into the innovations even on exact data
    cfg.p0 = 1e-8;
    const SolveReport rep = ukf_calibrate(sc.nominal, data, cfg);
    CHECK(rep.x_hat.cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(rep.iterations == 40);
    CHECK(rep.rmse_history.size() == 41);
  }
  SUBCASE("trace of P never grows without process noise") {
    SyntheticScenario sc;
    sc.nominal = test::bench_model();
    sc.n_points = 30;
    sc.seed = 6;
    sc.noise_std = 0.1;
    Rng rng(61);
    sc.x_true = test::random_deviation(rng, 0.01, 0.001);
    const auto [data, x_true] = synthesize(sc);

    UkfConfig cfg;
    cfg.q_process = 0.0;
    cfg.p0 = 1e-3;
    UkfState state{Eigen::VectorXd::Zero(kNumParams),
                   cfg.p0 * Eigen::MatrixXd::Identity(kNumParams, kNumParams)};
    double prev_trace = state.p.trace();
    for (const Measurement& point : data.points) {
      const UkfState pred = predict(state, cfg);
      const Observation obs = observe(pred, sc.nominal, point.joints, cfg);
      state = update(pred, point.z, obs);
      CHECK(state.p.trace() <= prev_trace * (1.0 + 1e-12));
      prev_trace = state.p.trace();
    }
  }
  SUBCASE("noisy run reaches the noise floor") {
    const double sigma = 0.1;
    SyntheticScenario sc = test::bench_scenario(8, sigma);
    const auto [data, x_true] = synthesize(sc);
    UkfConfig cfg;
    cfg.p0 = 0.25;  // prior wide enough for +-0.5 mm deviations
    cfg.r_meas = sigma * sigma;
    const SolveReport rep = ukf_calibrate(sc.nominal, data, cfg);
    CHECK(rep.rmse_history.back() <= 1.2 * sigma);
  }
}

TEST_CASE("ukf_slm_calibrate") {
  SUBCASE("zero-noise result matches the solver-only run") {
    const SyntheticScenario sc = test::bench_scenario(17, 0.0);
    const auto [data, x_true] = synthesize(sc);
    UkfConfig ucfg;
    ucfg.p0 = 0.25;
    const SolverConfig scfg;
    const SolveReport combined = ukf_slm_calibrate(sc.nominal, data, ucfg, scfg);
    const SolveReport only = slm_solve(sc.nominal, data, scfg);
    CHECK(std::abs(combined.rmse_history.back() - only.rmse_history.back()) <= 1e-9);
    REQUIRE(combined.stage_boundary.has_value());
    CHECK(*combined.stage_boundary == data.points.size());
    CHECK(combined.rmse_history.size() ==
          static_cast<std::size_t>(combined.iterations) + 1);
  }
}

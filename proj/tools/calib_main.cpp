// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: synthetic dataset generation, calibration runs,
// method comparison tables, and the Jacobian self-check.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "calib/data.hpp"
#include "calib/error_model.hpp"
#include "calib/errors.hpp"
#include "calib/kinematics.hpp"
#include "calib/manifest.hpp"
#include "calib/metrics.hpp"
#include "calib/rng.hpp"
#include "calib/solvers.hpp"
#include "calib/ukf.hpp"

namespace {

// Stable exit contract: 0 success, 2 usage/config, 3 non-convergence,
// 4 singular normal equations, 5 self-check failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitSingular = 4;
constexpr int kExitSelfCheck = 5;

std::string join_command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) {
      out += ' ';
    }
    const std::string arg = argv[i];
    if (arg.find(' ') != std::string::npos) {
      out += '"' + arg + '"';
    } else {
      out += arg;
    }
  }
  return out;
}

nlohmann::json manifest_json(const calib::RunManifest& manifest) {
  return nlohmann::json{{"command_line", manifest.command_line},
                        {"method", manifest.method},
                        {"config", nlohmann::json::parse(manifest.config_json)},
                        {"seed", manifest.seed},
                        {"dataset_digest", manifest.dataset_digest},
                        {"toolkit_version", manifest.toolkit_version},
                        {"started_utc", manifest.started_utc},
                        {"finished_utc", manifest.finished_utc}};
}

nlohmann::json triple_json(const calib::MetricTriple& t) {
  return nlohmann::json{{"rmse_mm", t.rmse}, {"std_mm", t.std}, {"max_mm", t.max}};
}

calib::MetricTriple triple_from_json(const nlohmann::json& j) {
  calib::MetricTriple t;
  t.rmse = j.at("rmse_mm").get<double>();
  t.std = j.at("std_mm").get<double>();
  t.max = j.at("max_mm").get<double>();
  return t;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw calib::IoError("cannot write file: " + path);
  }
  out << content;
  if (!out) {
    throw calib::IoError("failed while writing file: " + path);
  }
}

struct SynthOptions {
  std::string scenario_path;
  std::string out_csv;
  std::string truth_path;
  std::string model_out;
  std::optional<std::uint64_t> seed_override;
};

int run_synth(const SynthOptions& opt, const std::string& command_line) {
  const std::string started = calib::utc_timestamp();
  calib::SyntheticScenario scenario = calib::load_scenario(opt.scenario_path);
  if (opt.seed_override) {
    scenario.seed = *opt.seed_override;
  }
  const auto [set, x_true] = calib::synthesize(scenario);
  calib::save_measurements(set, opt.out_csv);
  if (!opt.model_out.empty()) {
    calib::save_robot_model(scenario.nominal, opt.model_out);
  }

  calib::RunManifest manifest;
  manifest.command_line = command_line;
  manifest.method = "synth";
  manifest.seed = scenario.seed;
  manifest.dataset_digest = calib::fnv1a64_file(opt.out_csv);
  manifest.started_utc = started;
  manifest.finished_utc = calib::utc_timestamp();
  const nlohmann::json config{{"scenario", opt.scenario_path},
                              {"n_points", scenario.n_points},
                              {"noise_std_mm", scenario.noise_std},
                              {"rng", calib::Rng::kAlgorithm}};
  manifest.config_json = config.dump();

  nlohmann::json truth{
      {"x_true", std::vector<double>(x_true.data(), x_true.data() + calib::kNumParams)},
      {"manifest", manifest_json(manifest)}};
  write_text_file(opt.truth_path, truth.dump(2) + "\n");
  return kExitOk;
}

struct CalibrateOptions {
  std::string model_path;
  std::string data_path;
  std::string method;
  std::string out_path;
  calib::SolverConfig solver;
  calib::UkfConfig ukf;
  bool serial = false;
  int threads = 0;
};

nlohmann::json solver_config_json(const calib::SolverConfig& cfg) {
  return nlohmann::json{{"lambda", cfg.lambda},
                        {"delta0", cfg.delta0},
                        {"mu", cfg.mu},
                        {"max_iter", cfg.max_iter},
                        {"tol_mm", cfg.tol}};
}

nlohmann::json ukf_config_json(const calib::UkfConfig& cfg) {
  return nlohmann::json{{"alpha", cfg.alpha},   {"beta", cfg.beta},
                        {"kappa", cfg.kappa},   {"q_process", cfg.q_process},
                        {"r_meas", cfg.r_meas}, {"p0", cfg.p0},
                        {"epochs", cfg.epochs}};
}

int run_calibrate(const CalibrateOptions& opt, const std::string& command_line) {
  const std::string started = calib::utc_timestamp();
#ifdef _OPENMP
  if (opt.threads > 0) {
    omp_set_num_threads(opt.threads);
  }
#endif
  const calib::Exec exec = opt.serial ? calib::Exec::Serial : calib::Exec::Parallel;

  const calib::RobotModel model = calib::load_robot_model(opt.model_path);
  const calib::MeasurementSet data = calib::load_measurements(opt.data_path);

  const calib::MetricTriple before = calib::evaluate(
      calib::residuals(model, calib::ParamDeviation::Zero(), data, exec));

  calib::SolveReport report;
  nlohmann::json config;
  if (opt.method == "ls") {
    const auto t0 = std::chrono::steady_clock::now();
    const calib::ResidualVector e0 =
        calib::residuals(model, calib::ParamDeviation::Zero(), data, exec);
    const calib::IdentificationJacobian j = calib::identification_jacobian(
        model, calib::ParamDeviation::Zero(), data, exec);
    report.x_hat = calib::least_squares_step(j, e0);
    report.iterations = 1;
    report.converged = true;
    report.rmse_history.push_back(before.rmse);
    report.rmse_history.push_back(
        calib::evaluate(calib::residuals(model, report.x_hat, data, exec)).rmse);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    config = nlohmann::json{{"condition_limit", 1e12}};
  } else if (opt.method == "lm") {
    report = calib::lm_solve(model, data, opt.solver, exec);
    config = solver_config_json(opt.solver);
  } else if (opt.method == "slm") {
    report = calib::slm_solve(model, data, opt.solver, exec);
    config = solver_config_json(opt.solver);
  } else if (opt.method == "ukf") {
    report = calib::ukf_calibrate(model, data, opt.ukf, exec);
    config = ukf_config_json(opt.ukf);
  } else if (opt.method == "ukf-slm") {
    report = calib::ukf_slm_calibrate(model, data, opt.ukf, opt.solver, exec);
    config = nlohmann::json{{"ukf", ukf_config_json(opt.ukf)},
                            {"slm", solver_config_json(opt.solver)}};
  } else {
    std::cerr << "unknown method '" << opt.method
              << "' (expected ls, lm, slm, ukf or ukf-slm)\n";
    return kExitUsage;
  }

  const calib::MetricTriple after =
      calib::evaluate(calib::residuals(model, report.x_hat, data, exec));

  calib::RunManifest manifest;
  manifest.command_line = command_line;
  manifest.method = opt.method;
  manifest.config_json = config.dump();
  manifest.dataset_digest = calib::fnv1a64_file(opt.data_path);
  manifest.started_utc = started;
  manifest.finished_utc = calib::utc_timestamp();

  nlohmann::json doc{
      {"method", opt.method},
      {"converged", report.converged},
      {"iterations", report.iterations},
      {"wall_time_s", report.wall_time_s},
      {"x_hat", std::vector<double>(report.x_hat.data(),
                                    report.x_hat.data() + calib::kNumParams)},
      {"before", triple_json(before)},
      {"after", triple_json(after)},
      {"rmse_history_mm", report.rmse_history},
      {"manifest", manifest_json(manifest)}};
  if (report.stage_boundary) {
    doc["stage_boundary"] = *report.stage_boundary;
  }
  write_text_file(opt.out_path, doc.dump(2) + "\n");

  std::cout << opt.method << ": rmse " << before.rmse << " -> " << after.rmse
            << " mm in " << report.iterations << " iterations ("
            << (report.converged ? "converged" : "did not converge") << ")\n";
  return report.converged ? kExitOk : kExitNotConverged;
}

struct CompareOptions {
  std::vector<std::string> report_paths;
  std::string out_dir;
  bool include_before = true;
};

int run_compare(const CompareOptions& opt) {
  std::vector<std::pair<std::string, calib::MetricTriple>> entries;
  std::optional<calib::MetricTriple> before;
  std::vector<std::pair<std::string, std::vector<double>>> histories;

  for (const std::string& path : opt.report_paths) {
    std::ifstream in(path);
    if (!in) {
      throw calib::IoError("cannot open report: " + path);
    }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw calib::ParseError("report " + path + ": " + e.what());
    }
    try {
      const std::string method = doc.at("method").get<std::string>();
      entries.emplace_back(method, triple_from_json(doc.at("after")));
      if (!before) {
        before = triple_from_json(doc.at("before"));
      }
      histories.emplace_back(method,
                             doc.at("rmse_history_mm").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw calib::ParseError("report " + path + ": " + e.what());
    }
  }
  if (opt.include_before && before) {
    entries.emplace_back("Before", *before);
  }

  const calib::ComparisonTable table = calib::compare(entries);

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  write_text_file((dir / "comparison.txt").string(), table.to_text());
  write_text_file((dir / "comparison.json").string(), table.to_json() + "\n");
  for (const auto& [method, history] : histories) {
    std::string csv = "iteration,rmse_mm\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
      char line[64];
      std::snprintf(line, sizeof(line), "%zu,%.17g\n", i, history[i]);
      csv += line;
    }
    write_text_file((dir / ("history_" + method + ".csv")).string(), csv);
  }

  std::cout << table.to_text();
  return kExitOk;
}

struct JacobianCheckOptions {
  std::string model_path;
  std::string data_path;
  int inject_fault_column = -1;
  bool serial = false;
};

// Straight-line reference: perturbs the DH fields directly and evaluates
// the two-point quotient per entry. Shares nothing with the batched
// assembly or with apply_deviation.
Eigen::MatrixXd jacobian_reference(const calib::RobotModel& model,
                                   const calib::MeasurementSet& data) {
  const std::size_t m = data.points.size();
  Eigen::MatrixXd j(static_cast<Eigen::Index>(m), calib::kNumParams);
  for (int k = 0; k < calib::kNumParams; ++k) {
    const int link = k % calib::kNumLinks;
    const int block = k / calib::kNumLinks;
    const double h = block < 2 ? 1e-6 : 1e-7;
    calib::RobotModel plus = model;
    calib::RobotModel minus = model;
    double* fields_plus[] = {&plus.links[link].a, &plus.links[link].d,
                             &plus.links[link].alpha,
                             &plus.links[link].theta_offset};
    double* fields_minus[] = {&minus.links[link].a, &minus.links[link].d,
                              &minus.links[link].alpha,
                              &minus.links[link].theta_offset};
    *fields_plus[block] += h;
    *fields_minus[block] -= h;
    for (std::size_t i = 0; i < m; ++i) {
      const double zp = calib::cable_length(plus, data.points[i].joints);
      const double zm = calib::cable_length(minus, data.points[i].joints);
      j(static_cast<Eigen::Index>(i), k) = (zp - zm) / (2.0 * h);
    }
  }
  return j;
}

int run_jacobian_check(const JacobianCheckOptions& opt) {
  const calib::RobotModel model = calib::load_robot_model(opt.model_path);
  const calib::MeasurementSet data = calib::load_measurements(opt.data_path);
  const calib::Exec exec = opt.serial ? calib::Exec::Serial : calib::Exec::Parallel;

  Eigen::MatrixXd production = calib::identification_jacobian(
      model, calib::ParamDeviation::Zero(), data, exec);
  if (opt.inject_fault_column >= 0) {
    if (opt.inject_fault_column >= calib::kNumParams) {
      std::cerr << "fault column out of range\n";
      return kExitUsage;
    }
    production.col(opt.inject_fault_column).array() += 1e-3;
  }

  const Eigen::MatrixXd reference = jacobian_reference(model, data);
  const double discrepancy = (production - reference).cwiseAbs().maxCoeff();
  std::cout << "max |batched - reference| = " << discrepancy << " over "
            << production.rows() << "x" << production.cols() << " entries\n";
  if (!(discrepancy <= 1e-8)) {
    std::cerr << "jacobian self-check FAILED (threshold 1e-8)\n";
    return kExitSelfCheck;
  }
  std::cout << "jacobian self-check passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Draw-wire kinematic calibration toolkit for 6-axis serial robots"};
  app.require_subcommand(1);
  const std::string command_line = join_command_line(argc, argv);

  SynthOptions synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic measurement dataset");
  synth_cmd->add_option("--scenario", synth.scenario_path, "Scenario JSON")
      ->required();
  synth_cmd->add_option("--out", synth.out_csv, "Output measurement CSV")
      ->required();
  synth_cmd->add_option("--truth", synth.truth_path, "Output ground-truth JSON")
      ->required();
  synth_cmd->add_option("--model-out", synth.model_out,
                        "Also write the nominal model JSON here");
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = synth_cmd->add_option(
      "--seed", seed_value, "Override the scenario seed");

  CalibrateOptions cal;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Identify DH deviations");
  cal_cmd->add_option("--model", cal.model_path, "Robot model JSON")->required();
  cal_cmd->add_option("--data", cal.data_path, "Measurement CSV")->required();
  cal_cmd->add_option("--method", cal.method, "ls, lm, slm, ukf or ukf-slm")
      ->required();
  cal_cmd->add_option("--out", cal.out_path, "Output report JSON")->required();
  cal_cmd->add_option("--lambda", cal.solver.lambda, "Damping factor");
  cal_cmd->add_option("--delta0", cal.solver.delta0, "Initial step size");
  cal_cmd->add_option("--mu", cal.solver.mu, "Step decay factor in (0,1]");
  cal_cmd->add_option("--max-iter", cal.solver.max_iter, "Iteration cap");
  cal_cmd->add_option("--tol", cal.solver.tol, "RMSE-change stop threshold (mm)");
  cal_cmd->add_option("--ukf-alpha", cal.ukf.alpha, "Sigma spread");
  cal_cmd->add_option("--ukf-beta", cal.ukf.beta, "Prior weighting");
  cal_cmd->add_option("--ukf-kappa", cal.ukf.kappa, "Secondary scaling");
  cal_cmd->add_option("--ukf-q", cal.ukf.q_process, "Process noise (units^2)");
  cal_cmd->add_option("--ukf-r", cal.ukf.r_meas, "Measurement variance (mm^2)");
  cal_cmd->add_option("--ukf-p0", cal.ukf.p0, "Initial covariance (units^2)");
  cal_cmd->add_option("--ukf-epochs", cal.ukf.epochs, "Filter passes");
  cal_cmd->add_flag("--serial", cal.serial, "Disable the parallel kernels");
  cal_cmd->add_option("--threads", cal.threads, "OpenMP thread count");

  CompareOptions cmp;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Build a method comparison table");
  cmp_cmd->add_option("--report", cmp.report_paths, "Report JSON (repeatable)")
      ->required();
  cmp_cmd->add_option("--out-dir", cmp.out_dir, "Output directory")->required();
  cmp_cmd->add_flag("--before,!--no-before", cmp.include_before,
                    "Include/omit the uncalibrated row (default on)");

  JacobianCheckOptions jc;
  CLI::App* jc_cmd = app.add_subcommand(
      "jacobian-check", "Verify the batched Jacobian against a direct oracle");
  jc_cmd->add_option("--model", jc.model_path, "Robot model JSON")->required();
  jc_cmd->add_option("--data", jc.data_path, "Measurement CSV")->required();
  jc_cmd->add_option("--inject-fault", jc.inject_fault_column,
                     "Corrupt one Jacobian column (testing aid)");
  jc_cmd->add_flag("--serial", jc.serial, "Disable the parallel kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      if (*seed_opt) {
        synth.seed_override = seed_value;
      }
      return run_synth(synth, command_line);
    }
    if (cal_cmd->parsed()) {
      return run_calibrate(cal, command_line);
    }
    if (cmp_cmd->parsed()) {
      return run_compare(cmp);
    }
    if (jc_cmd->parsed()) {
      return run_jacobian_check(jc);
    }
  } catch (const calib::SingularMatrixError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingular;
  } catch (const calib::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const calib::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const calib::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitSelfCheck;
  }
  return kExitUsage;
}

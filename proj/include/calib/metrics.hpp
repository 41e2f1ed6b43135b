// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace calib {

/// Error statistics over a residual vector, all in mm. Note that `std`
/// follows the convention of this problem domain's reporting: it is the
/// mean absolute error, not a standard deviation. The chain
/// max >= rmse >= std always holds.
struct MetricTriple {
  double rmse = 0.0;
  double std = 0.0;
  double max = 0.0;
};

MetricTriple evaluate(const Eigen::VectorXd& residuals);

struct ComparisonRow {
  std::string method;
  MetricTriple metrics;
  /// Gains of the best method over the runner-up, percent, rounded to two
  /// decimals, ordered (rmse, std, max). Present on the best row only.
  std::optional<std::array<double, 3>> gain_pct;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  /// JSON array of {"method","rmse_mm","std_mm","max_mm","gain_pct"}.
  std::string to_json() const;
};

/// Sorts methods by ascending rmse. A row named "Before" is pinned last and
/// excluded from the gain computation. Duplicate names are rejected.
ComparisonTable compare(
    const std::vector<std::pair<std::string, MetricTriple>>& entries);

}  // namespace calib

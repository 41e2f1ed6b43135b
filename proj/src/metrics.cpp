// SPDX-License-Identifier: Apache-2.0
#include "calib/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace calib {

namespace {

constexpr const char* kBeforeLabel = "Before";

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

MetricTriple evaluate(const Eigen::VectorXd& residuals) {
  if (residuals.size() == 0) {
    throw std::invalid_argument("residual vector is empty");
  }
  MetricTriple t;
  const Eigen::ArrayXd abs = residuals.array().abs();
  t.max = abs.maxCoeff();
  t.std = abs.mean();
  t.rmse = std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size()));
  return t;
}

ComparisonTable compare(
    const std::vector<std::pair<std::string, MetricTriple>>& entries) {
  if (entries.empty()) {
    throw std::invalid_argument("comparison needs at least one entry");
  }
  std::set<std::string> names;
  for (const auto& [name, metrics] : entries) {
    if (!names.insert(name).second) {
      throw std::invalid_argument("duplicate method name: " + name);
    }
  }

  ComparisonTable table;
  for (const auto& [name, metrics] : entries) {
    table.rows.push_back(ComparisonRow{name, metrics, std::nullopt});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     const bool a_before = a.method == kBeforeLabel;
                     const bool b_before = b.method == kBeforeLabel;
                     if (a_before != b_before) {
                       return b_before;  // "Before" sorts last
                     }
                     return a.metrics.rmse < b.metrics.rmse;
                   });

  // Gain of the best method over the runner-up, per metric.
  std::vector<ComparisonRow*> methods;
  for (ComparisonRow& row : table.rows) {
    if (row.method != kBeforeLabel) {
      methods.push_back(&row);
    }
  }
  if (methods.size() >= 2) {
    const MetricTriple& best = methods[0]->metrics;
    const MetricTriple& second = methods[1]->metrics;
    methods[0]->gain_pct = {
        round2((second.rmse - best.rmse) / second.rmse * 100.0),
        round2((second.std - best.std) / second.std * 100.0),
        round2((second.max - best.max) / second.max * 100.0)};
  }
  return table;
}

std::string ComparisonTable::to_text() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %10s %10s %10s  %s\n", "Method",
                "RMSE(mm)", "Std(mm)", "Max(mm)", "Gain(%)");
  out += line;
  for (const ComparisonRow& row : rows) {
    std::string gain;
    if (row.gain_pct) {
      char g[64];
      std::snprintf(g, sizeof(g), "%.2f/%.2f/%.2f", (*row.gain_pct)[0],
                    (*row.gain_pct)[1], (*row.gain_pct)[2]);
      gain = g;
    }
    std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %10.4f  %s\n",
                  row.method.c_str(), row.metrics.rmse, row.metrics.std,
                  row.metrics.max, gain.c_str());
    out += line;
  }
  return out;
}

std::string ComparisonTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const ComparisonRow& row : rows) {
    nlohmann::json item{{"method", row.method},
                        {"rmse_mm", row.metrics.rmse},
                        {"std_mm", row.metrics.std},
                        {"max_mm", row.metrics.max}};
    if (row.gain_pct) {
      item["gain_pct"] = {{"rmse", (*row.gain_pct)[0]},
                          {"std", (*row.gain_pct)[1]},
                          {"max", (*row.gain_pct)[2]}};
    } else {
      item["gain_pct"] = nullptr;
    }
    arr.push_back(item);
  }
  return arr.dump(2);
}

}  // namespace calib

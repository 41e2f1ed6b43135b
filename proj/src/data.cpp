// SPDX-License-Identifier: Apache-2.0
#include "calib/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view field, int line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": not a valid number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": non-finite value: '" + std::string(field) + "'");
  }
  return value;
}

void validate_set(const MeasurementSet& set) {
  if (set.points.empty()) {
    throw std::invalid_argument("measurement set is empty");
  }
  for (const Measurement& p : set.points) {
    if (!p.joints.q.allFinite() || !std::isfinite(p.z) || p.z <= 0.0) {
      throw std::invalid_argument(
          "measurement set contains a non-finite or non-positive value");
    }
  }
}

void validate_scenario(const SyntheticScenario& sc) {
  if (!(sc.noise_std >= 0.0) || !std::isfinite(sc.noise_std)) {
    throw std::invalid_argument("noise_std must be finite and >= 0");
  }
  if (sc.n_points < 1) {
    throw std::invalid_argument("n_points must be >= 1");
  }
  if (!sc.x_true.allFinite()) {
    throw std::invalid_argument("x_true contains a non-finite value");
  }
  for (const JointRange& r : sc.joint_ranges) {
    if (!(r.lo < r.hi)) {
      throw std::invalid_argument("joint range must satisfy lo < hi");
    }
  }
}

}  // namespace

MeasurementSet load_measurements(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open measurement file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("line 1: missing header");
  }
  if (line != kCsvHeader) {
    throw ParseError(std::string("line 1: header must be exactly '") +
                     kCsvHeader + "'");
  }

  MeasurementSet set;
  set.provenance = path;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == EOF) {
      break;  // trailing newline
    }
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 7 " +
                       "comma-separated values, got " +
                       std::to_string(fields.size()));
    }
    Measurement m;
    for (int j = 0; j < kNumLinks; ++j) {
      m.joints.q[j] = parse_double(fields[static_cast<std::size_t>(j)], line_no);
    }
    m.z = parse_double(fields[6], line_no);
    if (m.z <= 0.0) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": cable length must be positive");
    }
    set.points.push_back(m);
  }
  if (set.points.empty()) {
    throw ParseError("file contains no measurement rows");
  }
  return set;
}

void save_measurements(const MeasurementSet& set, const std::string& path) {
  validate_set(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write measurement file: " + path);
  }
  out << kCsvHeader << "\n";
  for (const Measurement& m : set.points) {
    for (int j = 0; j < kNumLinks; ++j) {
      out << format_full(m.joints.q[j]) << ",";
    }
    out << format_full(m.z) << "\n";
  }
  if (!out) {
    throw IoError("failed while writing measurement file: " + path);
  }
}

std::pair<MeasurementSet, ParamDeviation> synthesize(
    const SyntheticScenario& scenario) {
  validate_scenario(scenario);
  Rng rng(scenario.seed);
  const RobotModel true_model = apply_deviation(scenario.nominal, scenario.x_true);

  MeasurementSet set;
  set.points.reserve(static_cast<std::size_t>(scenario.n_points));
  for (int i = 0; i < scenario.n_points; ++i) {
    Measurement m;
    for (int j = 0; j < kNumLinks; ++j) {
      m.joints.q[j] = rng.uniform(scenario.joint_ranges[static_cast<std::size_t>(j)].lo,
                                  scenario.joint_ranges[static_cast<std::size_t>(j)].hi);
    }
    m.z = cable_length(true_model, m.joints);
    if (scenario.noise_std > 0.0) {
      m.z += scenario.noise_std * rng.normal();
    }
    if (!(m.z > 0.0)) {
      throw NumericError(
          "synthesized cable length is non-positive; move the anchor away "
          "from the workspace or reduce the noise");
    }
    set.points.push_back(m);
  }
  std::ostringstream tag;
  tag << "synthetic seed=" << scenario.seed << " n=" << scenario.n_points
      << " noise_std_mm=" << scenario.noise_std << " rng=" << Rng::kAlgorithm;
  set.provenance = tag.str();
  return {set, scenario.x_true};
}

SyntheticScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open scenario file: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario " + path + ": " + e.what());
  }
  try {
    SyntheticScenario sc;
    const auto& model = doc.at("nominal_model");
    {
      const auto& links = model.at("links");
      if (!links.is_array() || links.size() != kNumLinks) {
        throw ParseError("scenario " + path + ": nominal_model.links must " +
                         "hold exactly " + std::to_string(kNumLinks) + " entries");
      }
      for (int i = 0; i < kNumLinks; ++i) {
        const auto& l = links.at(i);
        sc.nominal.links[i].a = l.at("a_mm").get<double>();
        sc.nominal.links[i].d = l.at("d_mm").get<double>();
        sc.nominal.links[i].alpha = l.at("alpha_rad").get<double>();
        sc.nominal.links[i].theta_offset = l.at("theta_offset_rad").get<double>();
      }
      const auto& anchor = model.at("anchor_mm");
      for (int i = 0; i < 3; ++i) {
        sc.nominal.anchor[i] = anchor.at(i).get<double>();
      }
    }
    if (doc.contains("x_true")) {
      const auto& x = doc.at("x_true");
      if (!x.is_array() || x.size() != kNumParams) {
        throw ParseError("scenario " + path + ": x_true must be a " +
                         std::to_string(kNumParams) + "-array");
      }
      for (int i = 0; i < kNumParams; ++i) {
        sc.x_true[i] = x.at(i).get<double>();
      }
    }
    sc.noise_std = doc.value("noise_std_mm", 0.0);
    sc.seed = doc.value("seed", std::uint64_t{0});
    sc.n_points = doc.at("n_points").get<int>();
    if (doc.contains("joint_ranges_rad")) {
      const auto& ranges = doc.at("joint_ranges_rad");
      if (!ranges.is_array() || ranges.size() != kNumLinks) {
        throw ParseError("scenario " + path + ": joint_ranges_rad must hold " +
                         std::to_string(kNumLinks) + " [lo,hi] pairs");
      }
      for (int i = 0; i < kNumLinks; ++i) {
        sc.joint_ranges[static_cast<std::size_t>(i)].lo = ranges.at(i).at(0).get<double>();
        sc.joint_ranges[static_cast<std::size_t>(i)].hi = ranges.at(i).at(1).get<double>();
      }
    }
    validate_scenario(sc);
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError("scenario " + path + ": " + e.what());
  }
}

void save_scenario(const SyntheticScenario& scenario, const std::string& path) {
  validate_scenario(scenario);
  nlohmann::json links = nlohmann::json::array();
  for (const DHLink& l : scenario.nominal.links) {
    links.push_back({{"a_mm", l.a},
                     {"d_mm", l.d},
                     {"alpha_rad", l.alpha},
                     {"theta_offset_rad", l.theta_offset}});
  }
  nlohmann::json ranges = nlohmann::json::array();
  for (const JointRange& r : scenario.joint_ranges) {
    ranges.push_back({r.lo, r.hi});
  }
  nlohmann::json doc{
      {"nominal_model",
       {{"links", links},
        {"anchor_mm",
         {scenario.nominal.anchor[0], scenario.nominal.anchor[1],
          scenario.nominal.anchor[2]}}}},
      {"x_true", std::vector<double>(scenario.x_true.data(),
                                     scenario.x_true.data() + kNumParams)},
      {"noise_std_mm", scenario.noise_std},
      {"seed", scenario.seed},
      {"n_points", scenario.n_points},
      {"joint_ranges_rad", ranges}};
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write scenario file: " + path);
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw IoError("failed while writing scenario file: " + path);
  }
}

}  // namespace calib

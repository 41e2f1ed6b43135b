// SPDX-License-Identifier: Apache-2.0
#include "calib/kinematics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "calib/errors.hpp"

namespace calib {

namespace {

bool finite(double v) { return std::isfinite(v); }

void require_finite_link(const DHLink& link) {
  if (!finite(link.a) || !finite(link.d) || !finite(link.alpha) ||
      !finite(link.theta_offset)) {
    throw std::invalid_argument("DH link contains a non-finite parameter");
  }
}

void require_valid(const RobotModel& model) {
  for (const DHLink& link : model.links) {
    require_finite_link(link);
  }
  if (!model.anchor.allFinite()) {
    throw std::invalid_argument("anchor point contains a non-finite value");
  }
}

}  // namespace

Transform link_transform(const DHLink& link, double q) {
  require_finite_link(link);
  if (!finite(q)) {
    throw std::invalid_argument("joint angle is non-finite");
  }
  const double theta = q + link.theta_offset;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(link.alpha);
  const double sa = std::sin(link.alpha);

  Transform k;
  k << ct, -st * ca,  st * sa, link.a * ct,
       st,  ct * ca, -ct * sa, link.a * st,
      0.0,       sa,       ca, link.d,
      0.0,      0.0,      0.0, 1.0;
  return k;
}

Transform forward_kinematics(const RobotModel& model, const JointConfig& joints) {
  require_valid(model);
  if (!joints.q.allFinite()) {
    throw std::invalid_argument("joint configuration is non-finite");
  }
  Transform k = link_transform(model.links[0], joints.q[0]);
  for (int i = 1; i < kNumLinks; ++i) {
    k = k * link_transform(model.links[i], joints.q[i]);
  }
  return k;
}

Eigen::Vector3d end_position(const RobotModel& model, const JointConfig& joints) {
  return forward_kinematics(model, joints).block<3, 1>(0, 3);
}

double cable_length(const RobotModel& model, const JointConfig& joints) {
  return (end_position(model, joints) - model.anchor).norm();
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open robot model file: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("robot model " + path + ": " + e.what());
  }
  try {
    const auto& links = doc.at("links");
    if (!links.is_array() || links.size() != kNumLinks) {
      throw ParseError("robot model " + path + ": 'links' must hold exactly " +
                       std::to_string(kNumLinks) + " entries");
    }
    RobotModel model;
    for (int i = 0; i < kNumLinks; ++i) {
      const auto& l = links.at(i);
      model.links[i].a = l.at("a_mm").get<double>();
      model.links[i].d = l.at("d_mm").get<double>();
      model.links[i].alpha = l.at("alpha_rad").get<double>();
      model.links[i].theta_offset = l.at("theta_offset_rad").get<double>();
    }
    const auto& anchor = doc.at("anchor_mm");
    if (!anchor.is_array() || anchor.size() != 3) {
      throw ParseError("robot model " + path + ": 'anchor_mm' must be a 3-array");
    }
    for (int i = 0; i < 3; ++i) {
      model.anchor[i] = anchor.at(i).get<double>();
    }
    require_valid(model);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("robot model " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError("robot model " + path + ": " + e.what());
  }
}

void save_robot_model(const RobotModel& model, const std::string& path) {
  require_valid(model);
  nlohmann::json links = nlohmann::json::array();
  for (const DHLink& l : model.links) {
    links.push_back({{"a_mm", l.a},
                     {"d_mm", l.d},
                     {"alpha_rad", l.alpha},
                     {"theta_offset_rad", l.theta_offset}});
  }
  nlohmann::json doc{
      {"links", links},
      {"anchor_mm", {model.anchor[0], model.anchor[1], model.anchor[2]}}};
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write robot model file: " + path);
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw IoError("failed while writing robot model file: " + path);
  }
}

}  // namespace calib

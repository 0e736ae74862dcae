#include "collision_ik/robot_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/LU>
#include <json.hpp>

#include "collision_ik/error.hpp"
#include "json_helpers.hpp"

namespace cik {

RobotModel::RobotModel(std::string name, std::vector<JointSpec> joints, std::vector<CapsuleSpec> capsules,
                       RigidTransform ee_offset)
    : name_(std::move(name)), joints_(std::move(joints)), capsules_(std::move(capsules)), ee_offset_(ee_offset) {
  if (joints_.empty()) throw ValidationError("joints", "chain needs at least one joint");
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto& j = joints_[i];
    const std::string path = "joints[" + std::to_string(i) + "]";
    if (!(std::abs(j.axis.norm() - 1.0) <= 1e-9)) throw ValidationError(path + ".axis", "axis must have unit norm");
    if (!is_unit(j.origin.rotation)) throw ValidationError(path + ".origin.quat_wxyz", "quaternion must have unit norm");
    if (!(j.lower <= j.upper)) throw ValidationError(path, "lower bound exceeds upper bound");
  }
  if (!is_unit(ee_offset_.rotation)) throw ValidationError("ee_offset.quat_wxyz", "quaternion must have unit norm");

  if (capsules_.empty()) {
    capsules_.reserve(joints_.size());
    for (std::size_t i = 0; i < joints_.size(); ++i) {
      const Vec3 tip = i + 1 < joints_.size() ? joints_[i + 1].origin.translation : ee_offset_.translation;
      capsules_.push_back({Vec3::Zero(), tip, kDefaultCapsuleRadius});
    }
  } else if (capsules_.size() != joints_.size()) {
    throw ValidationError("capsules", "expected one capsule per joint (" + std::to_string(joints_.size()) + "), got " +
                                          std::to_string(capsules_.size()));
  }
  for (std::size_t i = 0; i < capsules_.size(); ++i) {
    if (!(capsules_[i].radius > 0.0))
      throw ValidationError("capsules[" + std::to_string(i) + "].radius", "radius must be positive");
  }
}

JointVector RobotModel::lower_bounds() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].lower;
  return v;
}

JointVector RobotModel::upper_bounds() const {
  JointVector v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].upper;
  return v;
}

bool RobotModel::within_bounds(const JointVector& theta) const {
  check_dimension(theta);
  for (int i = 0; i < dof(); ++i)
    if (theta[i] < joints_[i].lower || theta[i] > joints_[i].upper) return false;
  return true;
}

JointVector RobotModel::clamp(const JointVector& theta) const {
  check_dimension(theta);
  return theta.cwiseMax(lower_bounds()).cwiseMin(upper_bounds());
}

void RobotModel::check_dimension(const JointVector& theta) const {
  if (theta.size() != dof())
    throw DimensionError("joint vector has " + std::to_string(theta.size()) + " entries, model has " +
                         std::to_string(dof()) + " joints");
}

namespace {

RigidTransform joint_motion(const JointSpec& j, double q) {
  if (j.kind == JointKind::Revolute) return {Vec3::Zero(), Quat(Eigen::AngleAxisd(q, j.axis))};
  return RigidTransform::from_translation(j.axis * q);
}

}  // namespace

KinematicsResult RobotModel::forward_kinematics(const JointVector& theta) const {
  check_dimension(theta);
  KinematicsResult out;
  out.link_frames.reserve(joints_.size());
  RigidTransform frame;
  for (int i = 0; i < dof(); ++i) {
    frame = frame * joints_[i].origin * joint_motion(joints_[i], theta[i]);
    out.link_frames.push_back(frame);
  }
  out.end_effector = to_pose(frame * ee_offset_);
  return out;
}

Pose RobotModel::end_effector_pose(const JointVector& theta) const { return forward_kinematics(theta).end_effector; }

std::vector<Capsule> RobotModel::link_shapes(const KinematicsResult& fk) const {
  std::vector<Capsule> out;
  out.reserve(capsules_.size());
  for (std::size_t i = 0; i < capsules_.size(); ++i) out.push_back(capsules_[i].transformed(fk.link_frames[i]));
  return out;
}

std::vector<Capsule> RobotModel::link_shapes(const JointVector& theta) const {
  return link_shapes(forward_kinematics(theta));
}

Eigen::Matrix3Xd RobotModel::position_jacobian(const JointVector& theta) const {
  check_dimension(theta);
  Eigen::Matrix3Xd jac(3, dof());
  std::vector<RigidTransform> joint_frames;
  joint_frames.reserve(joints_.size());
  RigidTransform frame;
  for (int i = 0; i < dof(); ++i) {
    const RigidTransform joint_frame = frame * joints_[i].origin;
    joint_frames.push_back(joint_frame);
    frame = joint_frame * joint_motion(joints_[i], theta[i]);
  }
  const Vec3 ee = (frame * ee_offset_).translation;
  for (int i = 0; i < dof(); ++i) {
    const Vec3 axis = joint_frames[i].apply_rotation(joints_[i].axis);
    if (joints_[i].kind == JointKind::Revolute)
      jac.col(i) = axis.cross(ee - joint_frames[i].translation);
    else
      jac.col(i) = axis;
  }
  return jac;
}

double manipulability(const RobotModel& model, const JointVector& theta) {
  const Eigen::Matrix3Xd j = model.position_jacobian(theta);
  const double det = (j * j.transpose()).determinant();
  return std::sqrt(std::max(det, 0.0));
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

using nlohmann::json;

JointSpec parse_joint(const json& j, const std::string& path) {
  JointSpec spec;
  const std::string kind = detail::require<std::string>(j, "kind", path);
  if (kind == "revolute")
    spec.kind = JointKind::Revolute;
  else if (kind == "prismatic")
    spec.kind = JointKind::Prismatic;
  else
    throw ValidationError(path + ".kind", "unknown joint kind '" + kind + "'");
  spec.axis = detail::vec3(detail::require_field(j, "axis", path), path + ".axis");
  spec.origin = j.contains("origin") ? detail::transform(j.at("origin"), path + ".origin") : RigidTransform{};
  spec.lower = detail::require<double>(j, "lower", path);
  spec.upper = detail::require<double>(j, "upper", path);
  return spec;
}

}  // namespace

RobotModel parse_robot_model(std::string_view document) {
  const json doc = detail::parse_json(document);
  if (!doc.is_object()) throw ParseError("robot model: top level must be an object");
  const std::string name = doc.value("name", std::string("robot"));
  const json& joints_doc = detail::require_field(doc, "joints", "");
  if (!joints_doc.is_array()) throw ParseError("joints: expected an array");
  std::vector<JointSpec> joints;
  for (std::size_t i = 0; i < joints_doc.size(); ++i)
    joints.push_back(parse_joint(joints_doc[i], "joints[" + std::to_string(i) + "]"));

  std::vector<CapsuleSpec> capsules;
  if (doc.contains("capsules")) {
    const json& caps = doc.at("capsules");
    if (!caps.is_array()) throw ParseError("capsules: expected an array");
    for (std::size_t i = 0; i < caps.size(); ++i) {
      const std::string path = "capsules[" + std::to_string(i) + "]";
      capsules.push_back({detail::vec3(detail::require_field(caps[i], "p0", path), path + ".p0"),
                          detail::vec3(detail::require_field(caps[i], "p1", path), path + ".p1"),
                          detail::require<double>(caps[i], "radius", path)});
    }
  }
  const RigidTransform ee = doc.contains("ee_offset") ? detail::transform(doc.at("ee_offset"), "ee_offset")
                                                      : RigidTransform{};
  return RobotModel(name, std::move(joints), std::move(capsules), ee);
}

RobotModel load_robot_model(const std::string& path) { return parse_robot_model(detail::read_file(path)); }

std::string serialize_robot_model(const RobotModel& model) {
  json doc;
  doc["name"] = model.name();
  json joints = json::array();
  for (const auto& j : model.joints()) {
    joints.push_back({{"kind", j.kind == JointKind::Revolute ? "revolute" : "prismatic"},
                      {"axis", detail::to_json(j.axis)},
                      {"origin", detail::to_json(j.origin)},
                      {"lower", j.lower},
                      {"upper", j.upper}});
  }
  doc["joints"] = std::move(joints);
  json caps = json::array();
  for (const auto& c : model.capsules())
    caps.push_back({{"p0", detail::to_json(c.p0)}, {"p1", detail::to_json(c.p1)}, {"radius", c.radius}});
  doc["capsules"] = std::move(caps);
  doc["ee_offset"] = detail::to_json(model.ee_offset());
  return doc.dump(2);
}

}  // namespace cik

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "collision_ik/collision/shapes.hpp"
#include "collision_ik/transform.hpp"

namespace cik {

using JointVector = Eigen::VectorXd;

enum class JointKind { Revolute, Prismatic };

struct JointSpec {
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();        // parent frame, unit length
  RigidTransform origin;            // parent link frame -> joint frame
  double lower = 0.0;               // rad or m
  double upper = 0.0;
};

/// Capsule in the link-local frame.
using CapsuleSpec = Capsule;

struct KinematicsResult {
  std::vector<RigidTransform> link_frames;  // world frame of link i, after joint i moves
  Pose end_effector;
};

/// Serial chain with one capsule per actuated link. Immutable once built.
class RobotModel {
 public:
  static constexpr double kDefaultCapsuleRadius = 0.05;

  /// Validates and builds. Missing capsules are auto-fitted from joint i's
  /// origin to joint i+1's origin (or the end-effector offset for the tip).
  RobotModel(std::string name, std::vector<JointSpec> joints, std::vector<CapsuleSpec> capsules,
             RigidTransform ee_offset);

  const std::string& name() const { return name_; }
  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<CapsuleSpec>& capsules() const { return capsules_; }
  const RigidTransform& ee_offset() const { return ee_offset_; }

  JointVector lower_bounds() const;
  JointVector upper_bounds() const;
  bool within_bounds(const JointVector& theta) const;
  JointVector clamp(const JointVector& theta) const;

  KinematicsResult forward_kinematics(const JointVector& theta) const;
  Pose end_effector_pose(const JointVector& theta) const;

  /// World-frame link capsules at `theta`.
  std::vector<Capsule> link_shapes(const JointVector& theta) const;
  std::vector<Capsule> link_shapes(const KinematicsResult& fk) const;

  /// 3 x dof geometric position Jacobian of the end effector.
  Eigen::Matrix3Xd position_jacobian(const JointVector& theta) const;

 private:
  void check_dimension(const JointVector& theta) const;

  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<CapsuleSpec> capsules_;
  RigidTransform ee_offset_;
};

/// sqrt(det(J J^T)) for the position Jacobian.
double manipulability(const RobotModel& model, const JointVector& theta);

/// Parses the JSON robot document. Throws ParseError or ValidationError.
RobotModel parse_robot_model(std::string_view document);
RobotModel load_robot_model(const std::string& path);
std::string serialize_robot_model(const RobotModel& model);

}  // namespace cik

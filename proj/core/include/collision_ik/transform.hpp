#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cik {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform: rotate by `rotation`, then translate by `translation`.
struct RigidTransform {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) { return {t, Quat::Identity()}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_rotation(const Vec3& v) const { return rotation * v; }
  Vec3 apply_inverse_rotation(const Vec3& v) const { return rotation.conjugate() * v; }

  RigidTransform inverse() const {
    const Quat inv = rotation.conjugate();
    return {-(inv * translation), inv};
  }

  Eigen::Matrix4d matrix() const;
};

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return {a.translation + a.rotation * b.translation, a.rotation * b.rotation};
}

/// End-effector pose. Quaternions are unit length and stored w-first on disk.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

inline Pose to_pose(const RigidTransform& tf) { return {tf.translation, tf.rotation}; }
inline RigidTransform to_transform(const Pose& p) { return {p.position, p.orientation}; }

/// Rotation angle of a * b^-1 in [0, pi]; invariant to the sign of either quaternion.
double rotation_angle_between(const Quat& a, const Quat& b);

/// |q| == 1 within `tol`.
bool is_unit(const Quat& q, double tol = 1e-9);

/// Spherical interpolation on the short arc.
Quat slerp(const Quat& a, const Quat& b, double u);

}  // namespace cik

#include "collision_ik/transform.hpp"

#include <algorithm>
#include <cmath>

namespace cik {

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

double rotation_angle_between(const Quat& a, const Quat& b) {
  const Quat d = a * b.conjugate();
  // atan2 form stays accurate near 0 and pi, unlike acos(|w|).
  const double w = std::abs(d.w());
  const double v = d.vec().norm();
  return 2.0 * std::atan2(v, w);
}

bool is_unit(const Quat& q, double tol) { return std::abs(q.norm() - 1.0) <= tol; }

Quat slerp(const Quat& a, const Quat& b, double u) {
  u = std::clamp(u, 0.0, 1.0);
  Quat bb = b;
  if (a.dot(b) < 0.0) bb.coeffs() = -b.coeffs();
  return a.slerp(u, bb).normalized();
}

}  // namespace cik

#pragma once

// Independent reference computations for tests. Nothing here may call the
// implementation paths under test (GJK, quickhull, FK composition).

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "collision_ik/collision/shapes.hpp"
#include "collision_ik/robot_model.hpp"

namespace cik::oracle {

// --- forward kinematics by homogeneous matrix products -----------------------

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d k;
  k << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return k;
}

// Rodrigues' formula, independent of quaternions.
inline Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Matrix3d k = skew(axis);
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

inline Eigen::Matrix3d quat_matrix(double w, double x, double y, double z) {
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w), 2 * (x * y + z * w), 1 - 2 * (x * x + z * z),
      2 * (y * z - x * w), 2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

inline Eigen::Matrix4d homogeneous(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

inline Eigen::Matrix4d homogeneous(const RigidTransform& tf) {
  const auto& q = tf.rotation;
  return homogeneous(quat_matrix(q.w(), q.x(), q.y(), q.z()), tf.translation);
}

/// Per-link world matrices, then the end effector as the last element.
inline std::vector<Eigen::Matrix4d> fk_matrices(const RobotModel& model, const Eigen::VectorXd& theta) {
  std::vector<Eigen::Matrix4d> out;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int i = 0; i < model.dof(); ++i) {
    const auto& j = model.joints()[i];
    Eigen::Matrix4d motion = Eigen::Matrix4d::Identity();
    if (j.kind == JointKind::Revolute)
      motion.topLeftCorner<3, 3>() = rodrigues(j.axis, theta[i]);
    else
      motion.topRightCorner<3, 1>() = j.axis * theta[i];
    m = m * homogeneous(j.origin) * motion;
    out.push_back(m);
  }
  out.push_back(m * homogeneous(model.ee_offset()));
  return out;
}

// --- point projections onto convex shapes (local frame) ---------------------

inline Eigen::Vector3d closest_on_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double d = ab.squaredNorm();
  const double t = d > 0 ? std::clamp((p - a).dot(ab) / d, 0.0, 1.0) : 0.0;
  return a + t * ab;
}

inline Eigen::Vector3d closest_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                           const Eigen::Vector3d& c) {
  // Plane projection if inside, else best edge.
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double nn = n.squaredNorm();
  if (nn > 0) {
    const Eigen::Vector3d q = p - n * (n.dot(p - a) / nn);
    const double u = n.dot((b - a).cross(q - a)), v = n.dot((c - b).cross(q - b)), w = n.dot((a - c).cross(q - c));
    if (u >= 0 && v >= 0 && w >= 0) return q;
  }
  Eigen::Vector3d best = closest_on_segment(p, a, b);
  for (const auto& cand : {closest_on_segment(p, b, c), closest_on_segment(p, c, a)})
    if ((cand - p).squaredNorm() < (best - p).squaredNorm()) best = cand;
  return best;
}

inline Eigen::Vector3d project(const Shape& s, const Eigen::Vector3d& p) {
  if (const auto* sp = std::get_if<Sphere>(&s)) {
    const double n = p.norm();
    return n <= sp->radius ? p : Eigen::Vector3d(p * (sp->radius / n));
  }
  if (const auto* b = std::get_if<Box>(&s)) return p.cwiseMax(-b->half_extents).cwiseMin(b->half_extents);
  if (const auto* c = std::get_if<Capsule>(&s)) {
    const Eigen::Vector3d q = closest_on_segment(p, c->p0, c->p1);
    const Eigen::Vector3d d = p - q;
    return d.norm() <= c->radius ? p : Eigen::Vector3d(q + d * (c->radius / d.norm()));
  }
  const auto& h = std::get<ConvexHull>(s);
  bool inside = true;
  for (std::size_t f = 0; f < h.faces().size() && inside; ++f) {
    const auto& fc = h.faces()[f];
    const Eigen::Vector3d a = h.vertices()[fc[0]], b = h.vertices()[fc[1]], c = h.vertices()[fc[2]];
    inside = (b - a).cross(c - a).dot(p - a) <= 0;
  }
  if (inside) return p;
  Eigen::Vector3d best = h.vertices()[0];
  for (const auto& fc : h.faces()) {
    const Eigen::Vector3d q = closest_on_triangle(p, h.vertices()[fc[0]], h.vertices()[fc[1]], h.vertices()[fc[2]]);
    if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
  }
  return best;
}

inline Eigen::Vector3d project_world(const Shape& s, const RigidTransform& tf, const Eigen::Vector3d& p) {
  return tf.apply(project(s, tf.inverse().apply(p)));
}

/// Random point roughly within the shape's reach (local frame).
inline Eigen::Vector3d sample_near(const Shape& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Aabb box = world_aabb(s, {});
  const Eigen::Vector3d c = 0.5 * (box.min + box.max), h = 0.5 * (box.max - box.min);
  return c + Eigen::Vector3d(u(rng) * h.x(), u(rng) * h.y(), u(rng) * h.z());
}

/// Dense sampling distance: many random starting pairs, each refined by
/// alternating projections onto the two sets; the minimum is reported.
inline double sampling_distance(const Shape& a, const RigidTransform& ta, const Shape& b, const RigidTransform& tb,
                                std::mt19937_64& rng, int starts = 64, int iterations = 4000) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Eigen::Vector3d pa = ta.apply(sample_near(a, rng));
    Eigen::Vector3d pb = project_world(b, tb, pa);
    pa = project_world(a, ta, pb);
    for (int it = 0; it < iterations; ++it) {
      const Eigen::Vector3d nb = project_world(b, tb, pa);
      const Eigen::Vector3d na = project_world(a, ta, nb);
      const double moved = (na - pa).norm() + (nb - pb).norm();
      pa = na;
      pb = nb;
      if (moved < 1e-13) break;
    }
    best = std::min(best, (pa - pb).norm());
    if (best < 1e-12) break;
  }
  return best;
}

/// True if p lies in the shape (local frame), with tolerance.
inline bool contains(const Shape& s, const Eigen::Vector3d& p, double tol = 1e-9) {
  return (project(s, p) - p).norm() <= tol;
}

// --- random generators ------------------------------------------------------

inline Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
}

inline std::vector<Eigen::Vector3d> random_ball_points(std::size_t n, std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  while (pts.size() < n) {
    Eigen::Vector3d p(u(rng), u(rng), u(rng));
    if (p.squaredNorm() <= 1.0) pts.push_back(p * radius);
  }
  return pts;
}

}  // namespace cik::oracle

#pragma once

#include <cstdint>

#include "collision_ik/collision/shapes.hpp"

namespace cik {

struct DistanceSettings {
  double tolerance = 1e-6;  // m, bound gap accepted as converged
  int max_iterations = 128;
};

struct DistanceResult {
  double distance = 0.0;  // >= 0, 0 when touching or overlapping
  Vec3 point_a = Vec3::Zero();  // closest points (world), valid when distance > 0
  Vec3 point_b = Vec3::Zero();
  int iterations = 0;
  bool converged = true;  // false: sampling fallback was used
};

/// Shortest distance between two placed convex shapes by GJK on the shapes'
/// polytope cores (point, segment, box, hull), with sphere and capsule radii
/// subtracted afterwards. Sphere and capsule pairs use the closed-form
/// segment distance instead.
DistanceResult distance_query(const Shape& a, const RigidTransform& ta, const Shape& b, const RigidTransform& tb,
                              const DistanceSettings& settings = {});

inline double distance(const Shape& a, const RigidTransform& ta, const Shape& b, const RigidTransform& tb) {
  return distance_query(a, ta, b, tb).distance;
}

/// Number of queries that exhausted the iteration cap and fell back to the
/// sampling estimate since process start.
std::uint64_t distance_fallback_count();

}  // namespace cik

#pragma once

#include <span>

#include "collision_ik/collision/shapes.hpp"

namespace cik {

/// Convex hull of a point cloud by quickhull. Points within a scale-relative
/// tolerance (1e-9 of the cloud's coordinate magnitude) of a face are treated
/// as lying on it and never become vertices.
///
/// Throws DegenerateInputError for fewer than four points or a cloud that is
/// collinear or coplanar.
ConvexHull convex_hull(std::span<const Vec3> points);

}  // namespace cik

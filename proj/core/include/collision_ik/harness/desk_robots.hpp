#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collision_ik/robot_model.hpp"

namespace cik {

/// Generated serial arms at 6, 7 and 8 DOF, standing on the desk plane
/// z = 0 with about one meter of reach. Throws ValidationError otherwise.
RobotModel desk_robot(int dof);

/// Bent, well-conditioned start configuration with the tool pointing at
/// the desk in front of the robot.
JointVector desk_home(const RobotModel& model);

/// Resolves a --robot argument: "desk6", "desk7", "desk8" or a model file.
RobotModel resolve_robot(const std::string& name_or_path);

/// A lumpy star-shaped closed surface sampled with `vertices` points, of
/// roughly `radius` size. Deterministic in `seed`.
std::vector<Vec3> blob_point_cloud(std::size_t vertices, double radius, std::uint64_t seed);

/// Point cloud from a Wavefront .obj ("v x y z" lines) or whitespace xyz
/// text. Throws ParseError when no points are found.
std::vector<Vec3> load_point_cloud(const std::string& path);

}  // namespace cik

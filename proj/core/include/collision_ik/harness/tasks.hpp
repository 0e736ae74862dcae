#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "collision_ik/collision/scene.hpp"
#include "collision_ik/robot_model.hpp"

namespace cik {

/// Piecewise-linear positions with slerped orientations; clamps outside
/// its time range.
struct GoalTrajectory {
  std::vector<double> times;  // strictly increasing
  std::vector<Pose> poses;

  Pose at(double t) const;
  double path_length() const;
  void validate() const;
};

struct TaskParams {
  double duration = 20.0;     // s
  double rate_hz = 125.0;
  double square_side = 0.4;   // m
  double jitter = 0.01;       // seeded obstacle placement noise, m
  double start_jitter = 0.01; // seeded start configuration noise, rad
};

struct TaskScript {
  std::string name;
  GoalTrajectory goal;
  std::vector<CollisionObject> objects;
  double duration = 0.0;
  double rate_hz = 0.0;
  JointVector initial;

  double tick_period() const { return 1.0 / rate_hz; }
  /// Ticks at k / rate for k = 1 .. ticks().
  std::size_t ticks() const;
  CollisionScene make_scene(SceneParams params = {}) const;
};

/// around_table, around_table_close, square_tracing, isolated_rotations.
/// Geometry is laid out relative to the robot's home tool pose. Throws
/// ValidationError for unknown names or bad parameters.
TaskScript build_task(std::string_view name, const RobotModel& robot, const TaskParams& params = {},
                      std::uint64_t seed = 0);

const std::vector<std::string>& task_names();

/// Object id of the table in the table tasks.
inline constexpr ObjectId kTableId = 1;

}  // namespace cik

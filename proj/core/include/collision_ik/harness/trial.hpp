#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collision_ik/harness/tasks.hpp"
#include "collision_ik/objective/objective.hpp"
#include "collision_ik/solver/engine.hpp"

namespace cik {

struct TickRecord {
  double t = 0.0;
  JointVector theta;
  Pose goal;
  double min_distance = 0.0;  // environment, all objects
  std::size_t active = 0;
  double orientation_weight = 0.0;
  double latency_us = 0.0;
  int iterations = 0;
};

struct TrialLog {
  std::string robot;
  std::string task;
  std::string variant;
  std::uint64_t seed = 0;
  double tick_period = 0.0;
  std::vector<TickRecord> ticks;
  bool aborted = false;  // the solver threw; ticks hold the partial run
  std::string error;
};

struct RunMetrics {
  double mean_position_error = 0.0;  // m
  double mean_rotation_error = 0.0;  // rad
  double mean_joint_velocity = 0.0;  // rad/s
  double mean_joint_acceleration = 0.0;
  double mean_joint_jerk = 0.0;
  std::size_t singularity_count = 0;
  std::size_t self_collision_count = 0;
  std::size_t env_collision_count = 0;
  double terminal_position_error = 0.0;
  double min_env_distance = 0.0;
  std::size_t ticks = 0;
  double latency_mean_us = 0.0;
  double latency_p99_us = 0.0;
};

/// Errors, derivative norms and event counts over a log. Kinematic
/// quantities are recomputed from the logged configurations. Throws
/// ValidationError for an empty log or nonuniform tick spacing.
RunMetrics compute_metrics(const TrialLog& log, const RobotModel& model, double manipulability_min = 0.01);

struct TrialOptions {
  ObjectiveSpec objective = ObjectiveSpec::defaults();
  SolverSettings solver = deterministic_solver();
  SceneParams scene;

  /// Wall-clock budget off: results depend only on the inputs.
  static SolverSettings deterministic_solver() {
    SolverSettings s;
    s.time_budget_us = std::numeric_limits<double>::infinity();
    return s;
  }
};

struct TrialResult {
  TrialLog log;
  RunMetrics metrics;
};

/// Ticks an engine of the given variant through the task.
TrialResult run_trial(const TaskScript& task, const RobotModel& model, Variant variant, std::uint64_t seed,
                      const TrialOptions& options = {});

}  // namespace cik

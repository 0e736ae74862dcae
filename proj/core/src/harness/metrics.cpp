#include <algorithm>
#include <cmath>

#include "collision_ik/error.hpp"
#include "collision_ik/harness/trial.hpp"

namespace cik {

RunMetrics compute_metrics(const TrialLog& log, const RobotModel& model, double manipulability_min) {
  const auto& ticks = log.ticks;
  if (ticks.empty()) throw ValidationError("log.ticks", "no ticks to measure");
  const double dt = log.tick_period;
  if (!(dt > 0.0)) throw ValidationError("log.tick_period", "must be positive");
  for (std::size_t k = 1; k < ticks.size(); ++k)
    if (std::abs(ticks[k].t - ticks[k - 1].t - dt) > 1e-6 * dt)
      throw ValidationError("log.ticks[" + std::to_string(k) + "].t", "tick spacing is not uniform");

  RunMetrics m;
  m.ticks = ticks.size();
  m.min_env_distance = std::numeric_limits<double>::infinity();
  double pos = 0.0, rot = 0.0;
  for (const auto& tick : ticks) {
    const KinematicsResult fk = model.forward_kinematics(tick.theta);
    const double e = (fk.end_effector.position - tick.goal.position).norm();
    pos += e;
    m.terminal_position_error = e;
    rot += rotation_angle_between(fk.end_effector.orientation, tick.goal.orientation);
    if (tick.min_distance <= 0.0) ++m.env_collision_count;
    m.min_env_distance = std::min(m.min_env_distance, tick.min_distance);
    if (self_min_distance(model.link_shapes(fk)) <= 0.0) ++m.self_collision_count;
    if (manipulability(model, tick.theta) < manipulability_min) ++m.singularity_count;
  }
  const double n = static_cast<double>(ticks.size());
  m.mean_position_error = pos / n;
  m.mean_rotation_error = rot / n;

  // Backward differences over the log wherever enough samples exist.
  auto mean_norm = [&](int order) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = static_cast<std::size_t>(order); k < ticks.size(); ++k) {
      const JointVector d0 = ticks[k].theta - ticks[k - 1].theta;
      JointVector d = d0;
      if (order >= 2) {
        const JointVector d1 = ticks[k - 1].theta - ticks[k - 2].theta;
        d = d0 - d1;
        if (order == 3) d -= d1 - (ticks[k - 2].theta - ticks[k - 3].theta);
      }
      sum += d.norm() / std::pow(dt, order);
      ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  };
  m.mean_joint_velocity = mean_norm(1);
  m.mean_joint_acceleration = mean_norm(2);
  m.mean_joint_jerk = mean_norm(3);

  std::vector<double> lat;
  lat.reserve(ticks.size());
  for (const auto& tick : ticks) lat.push_back(tick.latency_us);
  double total = 0.0;
  for (double l : lat) total += l;
  m.latency_mean_us = total / n;
  std::sort(lat.begin(), lat.end());
  m.latency_p99_us = lat[std::min(lat.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * n)) - 1)];
  return m;
}

}  // namespace cik

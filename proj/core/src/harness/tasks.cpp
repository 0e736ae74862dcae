#include "collision_ik/harness/tasks.hpp"

#include <cmath>
#include <random>

#include "collision_ik/error.hpp"
#include "collision_ik/harness/desk_robots.hpp"

namespace cik {

Pose GoalTrajectory::at(double t) const {
  if (t <= times.front()) return poses.front();
  if (t >= times.back()) return poses.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double u = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return {poses[k - 1].position + u * (poses[k].position - poses[k - 1].position),
          slerp(poses[k - 1].orientation, poses[k].orientation, u)};
}

double GoalTrajectory::path_length() const {
  double len = 0.0;
  for (std::size_t k = 1; k < poses.size(); ++k) len += (poses[k].position - poses[k - 1].position).norm();
  return len;
}

void GoalTrajectory::validate() const {
  if (times.empty() || times.size() != poses.size())
    throw ValidationError("goal.times", "need one time per pose and at least one pose");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ValidationError("goal.times", "must increase strictly");
}

std::size_t TaskScript::ticks() const { return static_cast<std::size_t>(std::floor(duration * rate_hz + 1e-9)); }

CollisionScene TaskScript::make_scene(SceneParams params) const {
  CollisionScene scene(params);
  for (const auto& obj : objects) scene.add(obj);
  return scene;
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"around_table", "around_table_close", "square_tracing",
                                              "isolated_rotations"};
  return names;
}

namespace {

CollisionObject placed(ObjectId id, Shape shape, const Vec3& at) {
  const RigidTransform tf = RigidTransform::from_translation(at);
  return {id, std::move(shape), tf, tf, std::nullopt};
}

struct Builder {
  const TaskParams& params;
  std::mt19937_64 rng;
  Pose home;

  Vec3 jitter() {
    std::uniform_real_distribution<double> u(-params.jitter, params.jitter);
    return {u(rng), u(rng), u(rng)};
  }

  // Fractions of the duration to absolute times.
  std::vector<double> at(std::initializer_list<double> fractions) const {
    std::vector<double> out;
    for (double f : fractions) out.push_back(f * params.duration);
    return out;
  }

  // The tool descends into the table, slides through it, and comes back up
  // beside where it started.
  void table(TaskScript& task, bool close) {
    const Vec3 p0 = home.position;
    const double top = p0.z() - 0.15;
    const Vec3 half = close ? Vec3(0.25, 0.35, 0.05) : Vec3(0.15, 0.25, 0.05);
    // The close table reaches back toward the base; the goal ends under it.
    const Vec3 center = close ? Vec3(p0.x() - 0.05, 0.0, top - half.z()) : Vec3(p0.x() + 0.03, 0.0, top - half.z());
    task.objects.push_back(placed(kTableId, Box{half}, center + jitter()));
    const Quat q = home.orientation;
    if (close) {
      const Vec3 under(p0.x(), 0.0, top - 2 * half.z() - 0.08);
      task.goal.times = at({0.0, 0.35, 1.0});
      task.goal.poses = {{p0, q}, {under, q}, {under, q}};
    } else {
      const Vec3 inside(p0.x(), 0.0, center.z());
      const Vec3 slid = inside + Vec3(0.0, 0.15, 0.0);
      task.goal.times = at({0.0, 0.3, 0.45, 0.65, 0.85, 1.0});
      task.goal.poses = {{p0, q}, {inside, q}, {inside, q}, {slid, q}, {p0 + Vec3(0, 0.15, 0), q},
                         {p0 + Vec3(0, 0.15, 0), q}};
    }
  }

  // Vertical square in front of the robot, starting and ending at the
  // middle of its lower edge. A cube moves onto the upper edge while the
  // goal is on it.
  void square(TaskScript& task) {
    const Vec3 p0 = home.position;
    const double s = params.square_side;
    const Quat q = home.orientation;
    const std::vector<Vec3> corners{p0,
                                    p0 + Vec3(0, s / 2, 0),
                                    p0 + Vec3(0, s / 2, s),
                                    p0 + Vec3(0, -s / 2, s),
                                    p0 + Vec3(0, -s / 2, 0),
                                    p0};
    // Constant speed along the perimeter over [0.05, 0.95] of the run.
    double total = 0.0;
    std::vector<double> cum{0.0};
    for (std::size_t k = 1; k < corners.size(); ++k) cum.push_back(total += (corners[k] - corners[k - 1]).norm());
    for (std::size_t k = 0; k < corners.size(); ++k) {
      task.goal.times.push_back(params.duration * (0.05 + 0.9 * cum[k] / total));
      task.goal.poses.push_back({corners[k], q});
    }
    task.goal.times.insert(task.goal.times.begin(), 0.0);
    task.goal.poses.insert(task.goal.poses.begin(), {p0, q});

    const double half = 0.05;
    const Vec3 parked = p0 + Vec3(0.02, 0.0, s + 0.02) + jitter();
    const Vec3 away = p0 + Vec3(1.2, 0.0, s + 0.3);
    CollisionObject cube = placed(2, Box{Vec3::Constant(half)}, away);
    cube.motion = MotionScript::waypoints(
        at({0.0, 0.25, 0.42, 0.62, 0.8}),
        {RigidTransform::from_translation(away), RigidTransform::from_translation(away),
         RigidTransform::from_translation(parked), RigidTransform::from_translation(parked),
         RigidTransform::from_translation(away)});
    task.objects.push_back(cube);
  }

  // Fixed position; +90 and back about the tool x, y and z axes in turn,
  // while three spheres close in around the hand.
  void rotations(TaskScript& task) {
    const Vec3 p = home.position;
    const Quat q0 = home.orientation;
    task.goal.times = {0.0};
    task.goal.poses = {{p, q0}};
    const double seg = params.duration / 7.0;
    double t = 0.5 * seg;
    task.goal.times.push_back(t);
    task.goal.poses.push_back({p, q0});
    for (const Vec3 axis : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}) {
      const Quat turned = q0 * Quat(Eigen::AngleAxisd(M_PI / 2, axis));
      task.goal.times.push_back(t += seg);
      task.goal.poses.push_back({p, turned});
      task.goal.times.push_back(t += seg);
      task.goal.poses.push_back({p, q0});
    }
    const std::vector<Vec3> dirs{Vec3(1, 0, 0.3), Vec3(-0.2, 1, 0.2), Vec3(-0.2, -1, 0.2)};
    ObjectId id = 3;
    for (const Vec3& d : dirs) {
      const Vec3 u = d.normalized();
      const Vec3 far = p + u * 0.9;
      const Vec3 near = p + u * 0.26 + jitter();
      CollisionObject s = placed(id++, Sphere{0.06}, far);
      s.motion = MotionScript::waypoints(at({0.0, 0.1, 0.3, 0.9, 1.0}),
                                         {RigidTransform::from_translation(far), RigidTransform::from_translation(far),
                                          RigidTransform::from_translation(near), RigidTransform::from_translation(near),
                                          RigidTransform::from_translation(far)});
      task.objects.push_back(s);
    }
  }
};

}  // namespace

TaskScript build_task(std::string_view name, const RobotModel& robot, const TaskParams& params, std::uint64_t seed) {
  if (!(params.duration > 0.0)) throw ValidationError("duration", "must be positive");
  if (!(params.rate_hz > 0.0)) throw ValidationError("rate_hz", "must be positive");
  if (!(params.square_side > 0.0)) throw ValidationError("square_side", "must be positive");

  TaskScript task;
  task.name = std::string(name);
  task.duration = params.duration;
  task.rate_hz = params.rate_hz;
  Builder b{params, std::mt19937_64(seed), {}};
  const JointVector home = desk_home(robot);
  b.home = robot.end_effector_pose(home);
  std::uniform_real_distribution<double> u(-params.start_jitter, params.start_jitter);
  task.initial = robot.clamp(home + JointVector::NullaryExpr(home.size(), [&] { return u(b.rng); }));

  if (name == "around_table")
    b.table(task, false);
  else if (name == "around_table_close")
    b.table(task, true);
  else if (name == "square_tracing")
    b.square(task);
  else if (name == "isolated_rotations")
    b.rotations(task);
  else
    throw ValidationError("task", "unknown task '" + std::string(name) + "'");
  task.goal.validate();
  return task;
}

}  // namespace cik

#include "collision_ik/harness/scalability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "collision_ik/collision/quickhull.hpp"
#include "collision_ik/harness/desk_robots.hpp"
#include "collision_ik/harness/tasks.hpp"
#include "collision_ik/solver/engine.hpp"

namespace cik {

ScalabilityReport scalability_run(const ScalabilityOptions& options) {
  using Clock = std::chrono::steady_clock;
  ScalabilityReport rep;
  rep.obstacles = options.obstacles;
  rep.hulls = options.force_hulls || options.mesh.has_value() || options.obstacles > 4;

  const RobotModel model = desk_robot(options.dof);
  const JointVector home = desk_home(model);
  const Pose start = model.end_effector_pose(home);

  // Obstacles on a shell around the base, clear of the reachable core,
  // drifting slowly.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), shell(0.8, 2.0), drift(-0.03, 0.03);
  CollisionScene scene;
  double build_ms = 0.0, hull_vertices = 0.0;
  for (std::size_t i = 0; i < options.obstacles; ++i) {
    Vec3 dir;
    do dir = Vec3(u(rng), u(rng), 0.5 * (u(rng) + 1.0));
    while (dir.norm() < 0.2);
    Vec3 at = dir.normalized() * shell(rng);
    at.z() = std::max(at.z(), 0.1);
    // Keep the tool's circle itself free.
    if ((at - start.position).norm() < 0.3) at += (at - start.position).normalized() * 0.3;
    Shape shape;
    if (rep.hulls) {
      std::vector<Vec3> cloud = options.mesh ? *options.mesh : blob_point_cloud(options.blob_vertices, 1.0, rng());
      rep.mesh_vertices = cloud.size();
      // Normalise the cloud to the requested size.
      Aabb box;
      for (const auto& p : cloud) box.extend(p);
      const Vec3 mid = 0.5 * (box.min + box.max);
      const double scale = options.obstacle_size / (0.5 * (box.max - box.min).maxCoeff());
      for (auto& p : cloud) p = (p - mid) * scale;
      const auto t0 = Clock::now();
      ConvexHull hull = convex_hull(cloud);
      build_ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      hull_vertices += static_cast<double>(hull.vertices().size());
      shape = std::move(hull);
    } else {
      shape = Sphere{options.obstacle_size};
    }
    const RigidTransform tf{at, Quat(Eigen::AngleAxisd(M_PI * u(rng), Vec3(u(rng), u(rng), u(rng) + 2).normalized()))};
    CollisionObject obj{static_cast<ObjectId>(i + 1), std::move(shape), tf, tf, std::nullopt};
    obj.motion = MotionScript::linear(Vec3(drift(rng), drift(rng), 0.0));
    scene.add(std::move(obj));
  }
  if (rep.hulls && options.obstacles > 0) {
    rep.hull_build_ms_mean = build_ms / static_cast<double>(options.obstacles);
    rep.hull_vertices_mean = hull_vertices / static_cast<double>(options.obstacles);
  }

  EngineConfig config;
  config.solver = options.solver;
  config.tick_period = 1.0 / options.rate_hz;
  Engine engine(model, std::move(scene), config, home, 0.0);

  const std::size_t ticks = static_cast<std::size_t>(std::floor(options.duration * options.rate_hz + 1e-9));
  std::vector<double> solve_us;
  solve_us.reserve(ticks);
  double step_total = 0.0, pos_total = 0.0;
  const ObjectiveSpec& spec = engine.objective();
  for (std::size_t k = 1; k <= ticks; ++k) {
    const double t = static_cast<double>(k) / options.rate_hz;
    const Pose goal{start.position + 0.1 * Vec3(std::cos(t) - 1.0, std::sin(t), 0.0), start.orientation};
    const TickResult r = engine.step(t, goal);
    solve_us.push_back(r.solve.wall_us);
    step_total += r.step_us;
    rep.max_active = std::max(rep.max_active, r.active_ids.size());
    pos_total += (model.end_effector_pose(r.solve.theta).position - goal.position).norm();
    if (r.min_distance <= 0.0) ++rep.env_collision_count;
    // Collision input at the solution, over the active set the solve used.
    std::vector<ActiveObstacle> active;
    for (ObjectId id : r.active_ids) {
      const auto* obj = engine.scene().find(id);
      active.push_back({id, obj->shape, obj->transform, 0.0, 0.0});
    }
    rep.collision_term_max =
        std::max(rep.collision_term_max,
                 collision_cost(active, model.link_shapes(r.solve.theta), spec.epsilon, spec.delta_min));
  }
  rep.ticks = ticks;
  if (ticks > 0) {
    const double n = static_cast<double>(ticks);
    double total = 0.0;
    for (double s : solve_us) total += s;
    rep.solve_mean_us = total / n;
    rep.step_mean_us = step_total / n;
    rep.mean_position_error = pos_total / n;
    std::sort(solve_us.begin(), solve_us.end());
    rep.solve_p99_us = solve_us[std::min(ticks - 1, static_cast<std::size_t>(std::ceil(0.99 * n)) - 1)];
  }
  return rep;
}

}  // namespace cik

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "collision_ik/error.hpp"
#include "collision_ik/harness/desk_robots.hpp"
#include "collision_ik/server/ws_server.hpp"

namespace cik::cli {
namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

CollisionScene scene_or_empty(const std::string& path, SceneParams params = {}) {
  return path.empty() ? CollisionScene(params) : load_scene(path, params);
}

JointVector start_config(const RobotModel& model, const std::string& text) {
  if (text.empty()) return desk_home(model);
  const auto v = parse_numbers(text);
  if (static_cast<int>(v.size()) != model.dof())
    throw DimensionError("theta0 has " + std::to_string(v.size()) + " values, robot has " +
                         std::to_string(model.dof()) + " joints");
  JointVector theta = Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  if (!model.within_bounds(theta)) throw ValidationError("theta0", "outside the joint limits");
  return theta;
}

nlohmann::json vec_json(const auto& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

int serve(const ServeArgs& args) {
  const Settings settings = args.settings.empty() ? Settings{} : load_settings(args.settings);
  RobotModel model = resolve_robot(args.robot);
  CollisionScene scene = scene_or_empty(args.scene);
  const double rate = args.rate_hz > 0.0 ? args.rate_hz : settings.rate_hz.value_or(100.0);
  const Variant variant = !args.variant.empty() ? parse_variant(args.variant) : settings.variant.value_or(Variant::Cik);

  EngineConfig config;
  config.objective = settings.objective;
  config.tick_period = 1.0 / rate;
  if (settings.solver) config.solver = *settings.solver;
  const JointVector home = desk_home(model);
  spdlog::info("robot {} ({} dof), {} obstacles, {} Hz, variant {}", model.name(), model.dof(), scene.size(), rate,
               to_string(variant));

  server::Session session(std::move(model), std::move(scene), config, home, variant);
  server::ServerOptions options;
  options.address = args.address;
  options.port = static_cast<unsigned short>(args.port);
  options.rate_hz = rate;
  server::StreamServer srv(session, options);
  srv.start();
  // Scripts wait for this line before connecting.
  std::cout << "listening on " << args.address << ":" << srv.port() << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto last_report = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    if (std::chrono::steady_clock::now() - last_report >= std::chrono::seconds(10)) {
      last_report = std::chrono::steady_clock::now();
      const auto s = srv.stats();
      spdlog::info("ticks {} clients {} frames in {} errors out {} dropped {}", s.ticks, s.clients, s.frames_in,
                   s.errors_out, s.dropped);
    }
    if (!srv.stats().loop_running) {
      spdlog::error("solve loop stopped");
      srv.stop();
      return 1;
    }
  }
  spdlog::info("shutting down");
  srv.stop();
  return 0;
}

int solve_once(const SolveOnceArgs& args) {
  if (args.ticks < 1) throw ValidationError("ticks", "must be at least 1");
  const Settings settings = args.settings.empty() ? Settings{} : load_settings(args.settings);
  RobotModel model = resolve_robot(args.robot);
  const JointVector theta0 = start_config(model, args.theta0);
  const Pose goal = args.goal.empty() ? model.end_effector_pose(theta0) : parse_pose(args.goal);

  EngineConfig config;
  config.objective = settings.objective;
  config.tick_period = 1.0 / settings.rate_hz.value_or(125.0);
  // Without a settings file the answer depends only on the inputs.
  config.solver = settings.solver.value_or(TrialOptions::deterministic_solver());
  const Variant variant = settings.variant.value_or(Variant::Cik);
  config.objective = variant_spec(config.objective, variant);

  Engine engine(model, scene_or_empty(args.scene), config, theta0);
  TickResult r;
  for (int k = 1; k <= args.ticks; ++k) r = engine.step(k * config.tick_period, goal);

  const Pose ee = engine.model().end_effector_pose(r.solve.theta);
  nlohmann::json out{
      {"theta", vec_json(r.solve.theta)},
      {"value", r.solve.value},
      {"iterations", r.solve.iterations},
      {"evaluations", r.solve.evaluations},
      {"termination", std::string(to_string(r.solve.reason))},
      {"wall_us", r.solve.wall_us},
      {"ee", {{"position", vec_json(ee.position)},
              {"quat_wxyz", {ee.orientation.w(), ee.orientation.x(), ee.orientation.y(), ee.orientation.z()}}}},
      {"position_error", (ee.position - goal.position).norm()},
      {"rotation_error", rotation_angle_between(ee.orientation, goal.orientation)},
      {"min_distance", std::isfinite(r.min_distance) ? nlohmann::json(r.min_distance) : nlohmann::json(nullptr)},
      {"active_ids", r.active_ids},
      {"ticks", args.ticks},
  };
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace cik::cli

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "collision_ik/error.hpp"

namespace {

// COLLISION_IK_LOG=trace|debug|info|warn|error|off, default warn. Logs go to
// stderr so stdout stays machine readable.
void init_logging() {
  auto logger = spdlog::stderr_color_mt("collision-ik");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("COLLISION_IK_LOG"); env && *env) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept that when asked for.
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("COLLISION_IK_LOG: unknown level '{}', using warn", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cik::cli;
  init_logging();

  CLI::App app{"Collision-aware per-instant inverse kinematics"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket stream server until interrupted");
  serve_cmd->add_option("--robot", serve_args.robot, "desk6, desk7, desk8 or a robot model file")->capture_default_str();
  serve_cmd->add_option("--scene", serve_args.scene, "Scene document (default: empty scene)");
  serve_cmd->add_option("--settings", serve_args.settings, "Settings document");
  serve_cmd->add_option("--address", serve_args.address, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port, "Listen port, 0 picks a free one")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  serve_cmd->add_option("--rate", serve_args.rate_hz, "Tick rate in Hz (default: settings, else 100)")
      ->check(CLI::Range(0.1, 10000.0));
  serve_cmd->add_option("--variant", serve_args.variant, "cik, cik3 or cikA");

  SolveOnceArgs once_args;
  auto* once_cmd = app.add_subcommand("solve-once", "Solve one tick and print the result as JSON");
  once_cmd->add_option("--robot", once_args.robot, "desk6, desk7, desk8 or a robot model file")->capture_default_str();
  once_cmd->add_option("--scene", once_args.scene, "Scene document (default: empty scene)");
  once_cmd->add_option("--settings", once_args.settings, "Settings document");
  once_cmd->add_option("--goal", once_args.goal, "\"x y z qw qx qy qz\" (default: the start pose)");
  once_cmd->add_option("--theta0", once_args.theta0, "Start configuration (default: home)");
  once_cmd->add_option("--ticks", once_args.ticks, "Repeat the solve this many ticks")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Benchmark harness");
  bench_cmd->require_subcommand(1);

  BenchRunArgs run_args;
  auto* run_cmd = bench_cmd->add_subcommand("run", "Run scripted tasks and write a CSV report");
  run_cmd->add_option("--task", run_args.tasks, "Task names, or 'all'")->capture_default_str();
  run_cmd->add_option("--robot", run_args.robots, "Robots")->capture_default_str();
  run_cmd->add_option("--variant", run_args.variants, "cik, cik3, cikA, rik")->capture_default_str();
  run_cmd->add_option("--seeds", run_args.seeds, "Seeds per cell")->capture_default_str();
  run_cmd->add_option("--first-seed", run_args.first_seed, "First seed")->capture_default_str();
  run_cmd->add_option("--out", run_args.out, "CSV report path")->capture_default_str();
  run_cmd->add_option("--summary", run_args.summary, "JSON summary path (includes latency)");
  run_cmd->add_option("--settings", run_args.settings, "Settings document");
  run_cmd->add_option("--duration", run_args.task.duration, "Trial length in s")->capture_default_str();
  run_cmd->add_option("--rate", run_args.task.rate_hz, "Tick rate in Hz")->capture_default_str();
  run_cmd->add_option("--square-side", run_args.task.square_side, "square_tracing side in m")->capture_default_str();

  BenchScaleArgs scale_args;
  auto& so = scale_args.options;
  auto* scale_cmd = bench_cmd->add_subcommand("scale", "Time ticks against many obstacles");
  scale_cmd->add_option("--obstacles", so.obstacles, "Obstacle count")->capture_default_str();
  scale_cmd->add_option("--mesh", scale_args.mesh, "Point cloud (.obj or xyz) for hull obstacles");
  scale_cmd->add_flag("--hulls", so.force_hulls, "Use hulls even for four or fewer obstacles");
  scale_cmd->add_option("--vertices", so.blob_vertices, "Generated blob vertex count")->capture_default_str();
  scale_cmd->add_option("--size", so.obstacle_size, "Obstacle radius in m")->capture_default_str();
  scale_cmd->add_option("--dof", so.dof, "Desk robot DOF")->check(CLI::Range(6, 8))->capture_default_str();
  scale_cmd->add_option("--duration", so.duration, "Seconds of simulated time")->capture_default_str();
  scale_cmd->add_option("--rate", so.rate_hz, "Tick rate in Hz")->capture_default_str();
  scale_cmd->add_option("--seed", so.seed, "Placement seed")->capture_default_str();
  scale_cmd->add_option("--out", scale_args.out, "Write the JSON report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*once_cmd) return solve_once(once_args);
    if (*run_cmd) return bench_run(run_args);
    if (*scale_cmd) return bench_scale(scale_args);
  } catch (const cik::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

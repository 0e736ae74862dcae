#include <fstream>
#include <iostream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "collision_ik/error.hpp"
#include "collision_ik/harness/desk_robots.hpp"
#include "collision_ik/harness/report.hpp"

namespace cik::cli {
namespace {

struct Cell {
  std::size_t trials = 0, aborted = 0, env_collisions = 0;
  double position_error = 0.0, rotation_error = 0.0, jerk = 0.0;
  double terminal_min = std::numeric_limits<double>::infinity();
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

}  // namespace

int bench_run(const BenchRunArgs& args) {
  if (args.seeds < 1) throw ValidationError("seeds", "must be at least 1");
  const Settings settings = args.settings.empty() ? Settings{} : load_settings(args.settings);
  TrialOptions trial_options;
  trial_options.objective = settings.objective;
  if (settings.solver) trial_options.solver = *settings.solver;

  std::vector<std::string> tasks = args.tasks;
  if (tasks.size() == 1 && tasks[0] == "all") tasks = task_names();
  std::vector<Variant> variants;
  for (const auto& v : args.variants) variants.push_back(parse_variant(v));

  std::vector<ReportRow> rows;
  std::map<std::tuple<std::string, std::string, std::string>, Cell> cells;
  for (const auto& robot_arg : args.robots) {
    const RobotModel model = resolve_robot(robot_arg);
    for (const auto& task_name : tasks) {
      for (const Variant variant : variants) {
        for (int i = 0; i < args.seeds; ++i) {
          const std::uint64_t seed = args.first_seed + static_cast<std::uint64_t>(i);
          const TaskScript task = build_task(task_name, model, args.task, seed);
          const TrialResult trial = run_trial(task, model, variant, seed, trial_options);
          if (trial.log.aborted) spdlog::error("{} {} {} seed {} aborted: {}", model.name(), task_name,
                                               to_string(variant), seed, trial.log.error);
          spdlog::debug("{} {} {} seed {}: env collisions {}, position error {:.4f}", model.name(), task_name,
                        to_string(variant), seed, trial.metrics.env_collision_count,
                        trial.metrics.mean_position_error);
          rows.push_back(report_row(trial));

          Cell& c = cells[{model.name(), task_name, std::string(to_string(variant))}];
          ++c.trials;
          c.aborted += trial.log.aborted ? 1 : 0;
          c.env_collisions += trial.metrics.env_collision_count;
          c.position_error += trial.metrics.mean_position_error;
          c.rotation_error += trial.metrics.mean_rotation_error;
          c.jerk += trial.metrics.mean_joint_jerk;
          c.terminal_min = std::min(c.terminal_min, trial.metrics.terminal_position_error);
        }
      }
    }
  }

  {
    auto out = open_out(args.out);
    write_csv(out, rows);
  }
  if (!args.summary.empty()) {
    auto out = open_out(args.summary);
    write_summary(out, rows);
  }

  std::vector<std::string> failures;
  std::cout << fmt::format("{:<8} {:<20} {:<12} {:>6} {:>9} {:>10} {:>10} {:>10}\n", "robot", "task", "variant",
                           "trials", "env_coll", "pos_err", "rot_err", "jerk");
  for (const auto& [key, c] : cells) {
    const auto& [robot, task, variant] = key;
    const double n = static_cast<double>(c.trials);
    std::cout << fmt::format("{:<8} {:<20} {:<12} {:>6} {:>9} {:>10.4f} {:>10.4f} {:>10.1f}\n", robot, task, variant,
                             c.trials, c.env_collisions, c.position_error / n, c.rotation_error / n, c.jerk / n);
    const std::string where = robot + " " + task + " " + variant;
    if (c.aborted > 0) failures.push_back(where + ": " + std::to_string(c.aborted) + " trials aborted");
    if (variant == "cik" && c.env_collisions > 0)
      failures.push_back(where + ": " + std::to_string(c.env_collisions) + " environment collisions");
    if (variant == "rik_ablated" && task == "around_table" && c.env_collisions == 0)
      failures.push_back(where + ": expected the ablation to collide at least once");
    if (variant != "rik_ablated" && task == "around_table_close" && c.terminal_min <= 0.05)
      failures.push_back(where + ": terminal position error " + fmt::format("{:.4f}", c.terminal_min) +
                         " m, expected the table to stall the arm beyond 0.05 m");
  }
  std::cout << rows.size() << " trials written to " << args.out << "\n";
  for (const auto& f : failures) std::cout << "FAIL " << f << "\n";
  return failures.empty() ? 0 : kAssertionFailed;
}

int bench_scale(const BenchScaleArgs& args) {
  ScalabilityOptions options = args.options;
  if (!args.mesh.empty()) options.mesh = load_point_cloud(args.mesh);
  const ScalabilityReport r = scalability_run(options);

  const std::size_t cap = SceneParams{}.max_active;
  std::vector<std::string> failures;
  if (r.max_active > cap) failures.push_back(fmt::format("active set reached {} (cap {})", r.max_active, cap));
  if (r.obstacles == 0 && r.collision_term_max != 0.0)
    failures.push_back("collision term is nonzero with no obstacles");

  const nlohmann::json out{
      {"obstacles", r.obstacles},
      {"hulls", r.hulls},
      {"mesh_vertices", r.mesh_vertices},
      {"hull_vertices_mean", r.hull_vertices_mean},
      {"hull_build_ms_mean", r.hull_build_ms_mean},
      {"ticks", r.ticks},
      {"solve_mean_us", r.solve_mean_us},
      {"solve_p99_us", r.solve_p99_us},
      {"step_mean_us", r.step_mean_us},
      {"max_active", r.max_active},
      {"mean_position_error", r.mean_position_error},
      {"env_collision_count", r.env_collision_count},
      {"collision_term_max", r.collision_term_max},
      {"failures", failures},
  };
  if (args.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    auto f = open_out(args.out);
    f << out.dump(2) << "\n";
  }
  for (const auto& f : failures) std::cerr << "FAIL " << f << "\n";
  return failures.empty() ? 0 : kAssertionFailed;
}

}  // namespace cik::cli

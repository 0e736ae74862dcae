#include <cmath>

#include "collision_ik/error.hpp"
#include "collision_ik/harness/trial.hpp"

namespace cik {

TrialResult run_trial(const TaskScript& task, const RobotModel& model, Variant variant, std::uint64_t seed,
                      const TrialOptions& options) {
  if (task.ticks() == 0) throw ValidationError("duration", "task has no ticks");
  EngineConfig config;
  config.objective = variant_spec(options.objective, variant);
  config.objective.epsilon = options.scene.epsilon;
  config.solver = options.solver;
  config.tick_period = task.tick_period();
  Engine engine(model, task.make_scene(options.scene), config, task.initial, 0.0);

  TrialResult out;
  TrialLog& log = out.log;
  log.robot = model.name();
  log.task = task.name;
  log.variant = std::string(to_string(variant));
  log.seed = seed;
  log.tick_period = task.tick_period();
  log.ticks.reserve(task.ticks());
  for (std::size_t k = 1; k <= task.ticks(); ++k) {
    const double t = static_cast<double>(k) * task.tick_period();
    const Pose goal = task.goal.at(t);
    try {
      const TickResult r = engine.step(t, goal);
      log.ticks.push_back({t, r.solve.theta, goal, r.min_distance, r.active_ids.size(), r.orientation_weight,
                           r.step_us, r.solve.iterations});
    } catch (const Error& e) {
      log.aborted = true;
      log.error = e.what();
      break;
    }
  }
  if (!log.ticks.empty()) out.metrics = compute_metrics(log, model, options.objective.manipulability_min);
  return out;
}

}  // namespace cik

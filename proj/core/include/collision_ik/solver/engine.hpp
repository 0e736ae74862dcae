#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "collision_ik/collision/scene.hpp"
#include "collision_ik/objective/objective.hpp"
#include "collision_ik/solver/solver.hpp"

namespace cik {

/// Engine variants: full method, position-only, adaptive orientation weight,
/// and the no-environment-term ablation.
enum class Variant { Cik, Cik3, CikA, RikAblated };

std::string_view to_string(Variant v);
/// Accepts cik, cik3, cikA, rik and rik_ablated.
std::optional<Variant> variant_from_string(std::string_view name);

/// Objective for a variant derived from the standard spec.
ObjectiveSpec variant_spec(const ObjectiveSpec& standard, Variant variant);

struct EngineConfig {
  ObjectiveSpec objective = ObjectiveSpec::defaults();
  SolverSettings solver;
  double tick_period = 0.008;  // nominal dt for finite differences, s
  std::size_t history_capacity = 4;
};

struct TickResult {
  SolveResult solve;
  std::vector<ObjectId> active_ids;
  double warm_min_distance = 0.0;  // nearest active obstacle before the solve (+inf if none)
  double min_distance = 0.0;       // all objects, at the solution
  double orientation_weight = 0.0; // after adaptation
  double step_us = 0.0;            // update + filter + solve
  bool active_changed = false;
};

/// One robot stream: scene update, filtering, weight adaptation and a
/// warm-started solve per tick.
class Engine {
 public:
  Engine(RobotModel model, CollisionScene scene, EngineConfig config, JointVector theta0, double t0 = 0.0);

  /// t must exceed the previous tick's time.
  TickResult step(double t, const Pose& goal);

  void set_objective(ObjectiveSpec spec);

  const RobotModel& model() const { return model_; }
  const CollisionScene& scene() const { return scene_; }
  CollisionScene& scene() { return scene_; }
  const ObjectiveSpec& objective() const { return config_.objective; }
  const EngineConfig& config() const { return config_; }
  const SolveHistory& history() const { return history_; }
  const JointVector& theta() const { return theta_; }
  Bounds bounds() const { return {model_.lower_bounds(), model_.upper_bounds()}; }

 private:
  RobotModel model_;
  CollisionScene scene_;
  EngineConfig config_;
  Solver solver_;
  SolveHistory history_;
  JointVector theta_;
  std::vector<ObjectId> last_active_;
};

}  // namespace cik

#include "collision_ik/solver/engine.hpp"

#include <chrono>
#include <limits>

#include "collision_ik/error.hpp"

namespace cik {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Cik:
      return "cik";
    case Variant::Cik3:
      return "cik3";
    case Variant::CikA:
      return "cikA";
    case Variant::RikAblated:
      return "rik_ablated";
  }
  return "unknown";
}

std::optional<Variant> variant_from_string(std::string_view name) {
  if (name == "cik") return Variant::Cik;
  if (name == "cik3") return Variant::Cik3;
  if (name == "cikA" || name == "cik_a") return Variant::CikA;
  if (name == "rik" || name == "rik_ablated") return Variant::RikAblated;
  return std::nullopt;
}

ObjectiveSpec variant_spec(const ObjectiveSpec& standard, Variant variant) {
  ObjectiveSpec spec = standard;
  switch (variant) {
    case Variant::Cik:
      spec.adaptive = AdaptivePolicy::Off;
      break;
    case Variant::Cik3:
      spec = standard.without(TermKind::EeOrientation);
      spec.adaptive = AdaptivePolicy::Off;
      break;
    case Variant::CikA:
      spec.adaptive = AdaptivePolicy::CikA;
      break;
    case Variant::RikAblated:
      spec = standard.without(TermKind::EnvCollision);
      spec.adaptive = AdaptivePolicy::Off;
      break;
  }
  return spec;
}

Engine::Engine(RobotModel model, CollisionScene scene, EngineConfig config, JointVector theta0, double t0)
    : model_(std::move(model)),
      scene_(std::move(scene)),
      config_(std::move(config)),
      solver_(config_.solver),
      history_(config_.history_capacity, config_.tick_period) {
  config_.objective.validate();
  theta_ = model_.clamp(theta0);
  history_.prime(theta_, t0);
}

void Engine::set_objective(ObjectiveSpec spec) {
  spec.validate();
  config_.objective = std::move(spec);
  solver_.reset_memory();
}

TickResult Engine::step(double t, const Pose& goal) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (!(t > history_.time(0))) throw Error("Engine::step: time must increase");

  TickResult out;
  scene_.update(t);
  const auto warm_links = model_.link_shapes(theta_);
  const std::vector<ActiveObstacle> active = scene_.filter_active(warm_links);
  out.active_ids = scene_.active_ids();
  out.active_changed = out.active_ids != last_active_;
  if (out.active_changed) solver_.reset_memory();
  last_active_ = out.active_ids;

  out.warm_min_distance = std::numeric_limits<double>::infinity();
  for (const auto& a : active) out.warm_min_distance = std::min(out.warm_min_distance, a.min_distance);
  const ObjectiveSpec spec = adapt_weights(config_.objective, out.warm_min_distance);
  if (const auto* o = spec.find(TermKind::EeOrientation)) out.orientation_weight = o->weight;

  const EvalContext ctx{model_, history_, &goal, active, t};
  const ScalarField f = [&](const JointVector& th) { return cik::objective(spec, ctx, th); };
  out.solve = solver_.solve(f, theta_, bounds());

  theta_ = out.solve.theta;
  history_.push(theta_, t);
  out.step_us = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
  out.min_distance = scene_.min_distance(model_.link_shapes(theta_));
  return out;
}

}  // namespace cik

#include "collision_ik/server/session.hpp"

#include <cmath>

namespace cik::server {

namespace {

OutFrame error_frame(std::string_view code, const std::string& detail) {
  return {protocol::encode_error(code, detail), false, true};
}

}  // namespace

Session::Session(RobotModel model, CollisionScene scene, EngineConfig config, JointVector theta0, Variant variant)
    : engine_(std::move(model), std::move(scene), config, std::move(theta0)),
      standard_(config.objective),
      variant_(variant) {
  if (variant_ == Variant::RikAblated) throw ValidationError("variant", "sessions run cik, cik3 or cikA");
  engine_.set_objective(variant_spec(standard_, variant_));
  goal_ = engine_.model().end_effector_pose(engine_.theta());
}

std::optional<std::string> Session::submit(ClientId from, std::string_view frame) {
  try {
    protocol::Inbound message = protocol::parse_inbound(frame);
    std::lock_guard lock(mutex_);
    queue_.push_back({from, std::move(message)});
    return std::nullopt;
  } catch (const protocol::ProtocolError& e) {
    return protocol::encode_error(e.code(), e.what());
  }
}

void Session::connect(ClientId client) {
  std::lock_guard lock(mutex_);
  queue_.push_back({client, std::nullopt});
}

std::size_t Session::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::optional<std::string> Session::apply(const protocol::Inbound& message, bool& scene_edited) {
  using namespace protocol;
  CollisionScene& scene = engine_.scene();
  try {
    if (const auto* m = std::get_if<GoalUpdate>(&message)) {
      goal_ = m->goal;
    } else if (const auto* m = std::get_if<ObstacleUpdate>(&message)) {
      scene.set_transform(m->id, m->transform);
      scene_edited = true;
    } else if (const auto* m = std::get_if<ObstacleAdd>(&message)) {
      scene.add(m->object);
      scene_edited = true;
    } else if (const auto* m = std::get_if<ObstacleRemove>(&message)) {
      scene.remove(m->id);
      scene_edited = true;
    } else if (const auto* m = std::get_if<SetVariant>(&message)) {
      variant_ = m->variant;
      engine_.set_objective(variant_spec(standard_, variant_));
      scene_edited = true;  // the description carries the variant
    }
  } catch (const UnknownIdError& e) {
    return encode_error(code::kUnknownId, e.what());
  } catch (const DuplicateIdError& e) {
    return encode_error(code::kDuplicateId, e.what());
  } catch (const Error& e) {
    return encode_error(code::kInvalid, e.what());
  }
  return std::nullopt;
}

protocol::SceneDescription Session::describe() const {
  protocol::SceneDescription d;
  const RobotModel& model = engine_.model();
  d.robot = model.name();
  d.theta = engine_.theta();
  d.lower = model.lower_bounds();
  d.upper = model.upper_bounds();
  d.links = model.link_shapes(engine_.theta());
  for (const CollisionObject* o : engine_.scene().objects())
    d.obstacles.push_back({o->id, o->shape, o->transform, o->motion.has_value()});
  d.tick_period = engine_.config().tick_period;
  d.variant = variant_;
  return d;
}

TickOutput Session::tick(double t) {
  std::vector<Queued> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(queue_);
  }
  TickOutput out;
  bool scene_edited = false;
  std::vector<ClientId> greeted;
  for (const auto& q : batch) {
    if (!q.message) {
      greeted.push_back(q.from);
      continue;
    }
    if (auto err = apply(*q.message, scene_edited)) out.replies.push_back({q.from, {std::move(*err), false, true}});
  }

  protocol::Solution& s = out.solution;
  s.t = t;
  s.goal = goal_;
  s.variant = variant_;
  try {
    const TickResult r = engine_.step(t, goal_);
    s.theta = r.solve.theta;
    if (std::isfinite(r.min_distance)) s.min_distance = r.min_distance;
    s.active_ids = r.active_ids;
    s.solve_us = r.solve.wall_us;
  } catch (const Error& e) {
    // The previous configuration stands; everyone learns why.
    s.theta = engine_.theta();
    s.min_distance.reset();
    out.replies.push_back({kEveryone, error_frame(protocol::code::kInternal, e.what())});
  }
  s.ee = engine_.model().end_effector_pose(s.theta);
  out.solution_frame = {protocol::encode(protocol::Outbound{s}), true};
  ++ticks_;

  if (scene_edited || !greeted.empty()) {
    OutFrame scene{protocol::encode(protocol::Outbound{describe()}), false};
    if (scene_edited)
      out.scene_frame = scene;
    else
      for (ClientId c : greeted) out.replies.push_back({c, scene});
  }
  return out;
}

}  // namespace cik::server

#include "collision_ik/collision/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "collision_ik/error.hpp"

namespace cik {

MotionScript MotionScript::linear(const Vec3& velocity, const Vec3& angular_velocity) {
  MotionScript m;
  m.kind = Kind::Linear;
  m.velocity = velocity;
  m.angular_velocity = angular_velocity;
  return m;
}

MotionScript MotionScript::waypoints(std::vector<double> times, std::vector<RigidTransform> poses) {
  if (times.empty() || times.size() != poses.size())
    throw ValidationError("motion.params", "waypoint times and poses must be nonempty and of equal length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ValidationError("motion.params.times", "must be strictly increasing");
  MotionScript m;
  m.kind = Kind::Waypoints;
  m.times = std::move(times);
  m.poses = std::move(poses);
  return m;
}

RigidTransform MotionScript::evaluate(const RigidTransform& initial, double t) const {
  if (kind == Kind::Linear) {
    RigidTransform out = initial;
    out.translation += velocity * t;
    const double angle = angular_velocity.norm() * t;
    if (angle != 0.0)
      out.rotation = (Quat(Eigen::AngleAxisd(angle, angular_velocity.normalized())) * initial.rotation).normalized();
    return out;
  }
  if (t <= times.front()) return poses.front();
  if (t >= times.back()) return poses.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double u = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return {(1.0 - u) * poses[i - 1].translation + u * poses[i].translation,
          slerp(poses[i - 1].rotation, poses[i].rotation, u)};
}

CollisionScene::CollisionScene(SceneParams params) : params_(params) {
  if (!(params_.epsilon > 0.0) || !(params_.margin >= 0.0) || !(params_.delta_min > 0.0))
    throw ValidationError("scene.params", "epsilon and delta_min must be positive, margin nonnegative");
}

Aabb CollisionScene::fattened_box(const CollisionObject& object) const {
  return world_aabb(object.shape, object.transform).inflated(0.5 * params_.margin);
}

void CollisionScene::add(CollisionObject object) {
  if (objects_.count(object.id)) throw DuplicateIdError("duplicate object id " + std::to_string(object.id));
  if (!is_unit(object.transform.rotation))
    throw ValidationError("objects[" + std::to_string(object.id) + "].transform", "quaternion must have unit norm");
  if (object.motion && time_set_) object.transform = object.motion->evaluate(object.initial, time_);
  Entry e{std::move(object)};
  e.proxy = tree_.insert(fattened_box(e.object).inflated(e.object.motion ? params_.tree_slack : 0.0), e.object.id);
  objects_.emplace(e.object.id, std::move(e));
}

CollisionScene::Entry& CollisionScene::entry(ObjectId id) {
  const auto it = objects_.find(id);
  if (it == objects_.end()) throw UnknownIdError("unknown object id " + std::to_string(id));
  return it->second;
}

void CollisionScene::remove(ObjectId id) {
  Entry& e = entry(id);
  tree_.remove(e.proxy);
  objects_.erase(id);
  active_ids_.erase(std::remove(active_ids_.begin(), active_ids_.end(), id), active_ids_.end());
}

void CollisionScene::set_transform(ObjectId id, const RigidTransform& tf) {
  Entry& e = entry(id);
  if (!is_unit(tf.rotation)) throw ValidationError("transform", "quaternion must have unit norm");
  e.object.transform = tf;
  e.object.initial = tf;
  e.object.motion.reset();
  tree_.update(e.proxy, fattened_box(e.object), params_.tree_slack);
}

void CollisionScene::update(double t) {
  if (time_set_ && t < time_) throw Error("CollisionScene::update: time moved backwards");
  time_ = t;
  time_set_ = true;
  for (auto& [id, e] : objects_) {
    if (!e.object.motion) continue;
    e.object.transform = e.object.motion->evaluate(e.object.initial, t);
    tree_.update(e.proxy, fattened_box(e.object), params_.tree_slack);
  }
}

const CollisionObject* CollisionScene::find(ObjectId id) const {
  const auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second.object;
}

std::vector<const CollisionObject*> CollisionScene::objects() const {
  std::vector<const CollisionObject*> out;
  out.reserve(objects_.size());
  for (const auto& [id, e] : objects_) out.push_back(&e.object);
  return out;
}

std::vector<ObjectId> CollisionScene::broadphase_candidates(std::span<const Capsule> links) const {
  std::vector<ObjectId> ids;
  for (const auto& link : links) {
    const Aabb q = capsule_aabb(link).inflated(0.5 * params_.margin);
    tree_.query(q, [&](std::int64_t id) { ids.push_back(id); });
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double object_cost(const Shape& shape, const RigidTransform& tf, std::span<const Capsule> links,
                   const SceneParams& params, double* min_distance) {
  double cost = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& link : links) {
    const double d = distance(shape, tf, Shape{link}, RigidTransform{});
    dmin = std::min(dmin, d);
    cost += collision_pair_cost(d, params.epsilon, params.delta_min);
  }
  if (min_distance) *min_distance = dmin;
  return cost;
}

std::vector<ActiveObstacle> CollisionScene::filter_active(std::span<const Capsule> links, FilterStats* stats) {
  const auto candidates = broadphase_candidates(links);
  std::vector<ActiveObstacle> survivors;
  for (const ObjectId id : candidates) {
    const CollisionObject& obj = objects_.at(id).object;
    double dmin = 0.0;
    const double cost = object_cost(obj.shape, obj.transform, links, params_, &dmin);
    if (dmin > params_.margin) continue;
    survivors.push_back({id, obj.shape, obj.transform, cost, dmin});
  }
  if (stats) {
    stats->broadphase_candidates = candidates.size();
    stats->within_margin = survivors.size();
  }
  std::sort(survivors.begin(), survivors.end(), [](const ActiveObstacle& a, const ActiveObstacle& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.id < b.id;
  });
  if (survivors.size() > params_.max_active) survivors.resize(params_.max_active);
  active_ids_.clear();
  for (const auto& s : survivors) active_ids_.push_back(s.id);
  return survivors;
}

double CollisionScene::min_distance(std::span<const Capsule> links) const {
  double best = std::numeric_limits<double>::infinity();
  if (objects_.empty() || links.empty()) return best;
  auto scan = [&](const CollisionObject& obj) {
    for (const auto& link : links) best = std::min(best, distance(obj.shape, obj.transform, Shape{link}, {}));
  };
  // Anything outside the broad phase is farther than the margin, so the
  // candidates decide the minimum whenever one of them is within it.
  for (const ObjectId id : broadphase_candidates(links)) scan(objects_.at(id).object);
  if (best <= params_.margin) return best;
  for (const auto& [id, e] : objects_) scan(e.object);
  return best;
}

}  // namespace cik

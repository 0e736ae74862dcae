#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collision_ik/collision/distance.hpp"
#include "collision_ik/collision/dynamic_tree.hpp"
#include "collision_ik/collision/shapes.hpp"

namespace cik {

using ObjectId = std::int64_t;

/// Scripted rigid motion t -> transform.
struct MotionScript {
  enum class Kind { Linear, Waypoints };

  Kind kind = Kind::Linear;
  Vec3 velocity = Vec3::Zero();          // m/s, linear
  Vec3 angular_velocity = Vec3::Zero();  // rad/s about world axes, linear
  std::vector<double> times;             // waypoints, strictly increasing
  std::vector<RigidTransform> poses;

  static MotionScript linear(const Vec3& velocity, const Vec3& angular_velocity = Vec3::Zero());
  static MotionScript waypoints(std::vector<double> times, std::vector<RigidTransform> poses);

  /// Linear motion is relative to `initial`; waypoints are absolute and
  /// clamp outside their time range.
  RigidTransform evaluate(const RigidTransform& initial, double t) const;
};

struct CollisionObject {
  ObjectId id = 0;
  Shape shape;
  RigidTransform initial;
  RigidTransform transform;
  std::optional<MotionScript> motion;
};

struct SceneParams {
  double epsilon = 0.02;     // collision cutoff, m
  double margin = 1.0;       // pruning margin, m
  std::size_t max_active = 3;
  double delta_min = 1e-3;   // distance clamp inside the cost only, m
  double tree_slack = 0.05;  // extra fattening of tree leaves for moving objects, m
};

/// (5 eps)^2 / max(dis, delta_min)^2
inline double collision_pair_cost(double dis, double epsilon, double delta_min) {
  const double d = dis < delta_min ? delta_min : dis;
  const double k = 5.0 * epsilon;
  return (k * k) / (d * d);
}

/// Snapshot of one active obstacle handed to the objective.
struct ActiveObstacle {
  ObjectId id = 0;
  Shape shape;
  RigidTransform transform;
  double cost = 0.0;          // per-object cost at filter time
  double min_distance = 0.0;  // to the nearest link at filter time
};

struct FilterStats {
  std::size_t broadphase_candidates = 0;
  std::size_t within_margin = 0;
};

class CollisionScene {
 public:
  explicit CollisionScene(SceneParams params = {});

  const SceneParams& params() const { return params_; }
  double time() const { return time_; }
  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }

  /// Throws DuplicateIdError.
  void add(CollisionObject object);
  /// Throws UnknownIdError.
  void remove(ObjectId id);
  /// External pose edit. Drops the object's motion script. Throws UnknownIdError.
  void set_transform(ObjectId id, const RigidTransform& tf);

  /// Advances scripted objects to time t and refits the tree. Throws if t
  /// moves backwards.
  void update(double t);

  const CollisionObject* find(ObjectId id) const;
  std::vector<const CollisionObject*> objects() const;  // ascending id

  /// Ids whose fattened leaf boxes overlap any fattened link box. A superset
  /// of the objects within `margin` of some link.
  std::vector<ObjectId> broadphase_candidates(std::span<const Capsule> links) const;

  /// Margin prune, then the `max_active` highest-cost objects (ties: lower
  /// id). Result is sorted by descending cost and also stored as the active set.
  std::vector<ActiveObstacle> filter_active(std::span<const Capsule> links, FilterStats* stats = nullptr);

  const std::vector<ObjectId>& active_ids() const { return active_ids_; }

  /// Minimum over all objects and links; +inf for an empty scene.
  double min_distance(std::span<const Capsule> links) const;

  const DynamicAabbTree& tree() const { return tree_; }
  Aabb fattened_box(const CollisionObject& object) const;

 private:
  struct Entry {
    CollisionObject object;
    std::int32_t proxy = DynamicAabbTree::kNull;
  };

  Entry& entry(ObjectId id);

  SceneParams params_;
  std::map<ObjectId, Entry> objects_;
  DynamicAabbTree tree_;
  std::vector<ObjectId> active_ids_;
  double time_ = 0.0;
  bool time_set_ = false;
};

/// Per-object costs sum over links: sum_n collision_pair_cost(dis(object, link_n)).
double object_cost(const Shape& shape, const RigidTransform& tf, std::span<const Capsule> links,
                   const SceneParams& params, double* min_distance = nullptr);

/// Scene document: JSON array of objects (see README). Throws ParseError,
/// ValidationError, DegenerateInputError (hull clouds), DuplicateIdError.
CollisionScene parse_scene(std::string_view document, SceneParams params = {});
CollisionScene load_scene(const std::string& path, SceneParams params = {});

}  // namespace cik

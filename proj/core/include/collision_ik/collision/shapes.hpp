#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "collision_ik/transform.hpp"

namespace cik {

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool valid() const { return (min.array() <= max.array()).all(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  Aabb inflated(double r) const { return {min.array() - r, max.array() + r}; }
  bool overlaps(const Aabb& o) const {
    return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
  }
  bool contains(const Aabb& o) const {
    return (min.array() <= o.min.array()).all() && (o.max.array() <= max.array()).all();
  }
  double surface_area() const {
    const Vec3 d = max - min;
    return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
  }
  static Aabb merged(const Aabb& a, const Aabb& b) { return {a.min.cwiseMin(b.min), a.max.cwiseMax(b.max)}; }
};

struct Sphere {
  double radius = 0.0;
};

/// Axis-aligned in its local frame, centered at the origin.
struct Box {
  Vec3 half_extents = Vec3::Zero();
};

/// Sphere-swept segment p0-p1.
struct Capsule {
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  double radius = 0.0;

  double segment_length() const { return (p1 - p0).norm(); }
  Capsule transformed(const RigidTransform& tf) const { return {tf.apply(p0), tf.apply(p1), radius}; }
};

/// Immutable convex polytope produced by quickhull. Copies share storage.
class ConvexHull {
 public:
  using Face = std::array<std::uint32_t, 3>;

  ConvexHull() = default;
  ConvexHull(std::vector<Vec3> vertices, std::vector<Face> faces);

  std::span<const Vec3> vertices() const { return data_->vertices; }
  std::span<const Face> faces() const { return data_->faces; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const;
  const Aabb& local_aabb() const { return data_->aabb; }
  bool empty() const { return !data_ || data_->vertices.empty(); }

  /// Index of a vertex maximizing dot(v, dir); hill-climbs the vertex graph
  /// from `hint`.
  std::uint32_t support_index(const Vec3& dir, std::uint32_t hint = 0) const;

  /// Outward unit normal and offset of every face: dot(n, x) <= offset inside.
  Vec3 face_normal(std::size_t f) const;
  double face_offset(std::size_t f) const;

  double volume() const;

 private:
  struct Data {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<std::uint32_t> adjacency_offsets;
    std::vector<std::uint32_t> adjacency;
    Aabb aabb;
  };
  std::shared_ptr<const Data> data_;
};

using Shape = std::variant<Sphere, Box, Capsule, ConvexHull>;

/// Point maximizing dot(p, dir) over the shape placed by `tf`. Throws on a
/// zero direction.
Vec3 support_point(const Shape& shape, const Vec3& dir, const RigidTransform& tf = {});

/// World-frame bounding box of a placed shape.
Aabb world_aabb(const Shape& shape, const RigidTransform& tf);
Aabb capsule_aabb(const Capsule& c);

}  // namespace cik

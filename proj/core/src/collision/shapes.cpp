#include "collision_ik/collision/shapes.hpp"

#include <cmath>

#include "collision_ik/error.hpp"

namespace cik {

ConvexHull::ConvexHull(std::vector<Vec3> vertices, std::vector<Face> faces) {
  auto d = std::make_shared<Data>();
  d->vertices = std::move(vertices);
  d->faces = std::move(faces);
  for (const auto& v : d->vertices) d->aabb.extend(v);

  // Vertex adjacency in CSR form, deduplicated.
  const std::size_t nv = d->vertices.size();
  std::vector<std::vector<std::uint32_t>> adj(nv);
  for (const auto& f : d->faces) {
    for (int k = 0; k < 3; ++k) {
      const auto a = f[k], b = f[(k + 1) % 3];
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  d->adjacency_offsets.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    auto& l = adj[i];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    d->adjacency_offsets[i + 1] = d->adjacency_offsets[i] + static_cast<std::uint32_t>(l.size());
  }
  d->adjacency.reserve(d->adjacency_offsets.back());
  for (const auto& l : adj) d->adjacency.insert(d->adjacency.end(), l.begin(), l.end());
  data_ = std::move(d);
}

std::span<const std::uint32_t> ConvexHull::neighbors(std::uint32_t v) const {
  const auto b = data_->adjacency_offsets[v];
  const auto e = data_->adjacency_offsets[v + 1];
  return {data_->adjacency.data() + b, e - b};
}

std::uint32_t ConvexHull::support_index(const Vec3& dir, std::uint32_t hint) const {
  const auto& verts = data_->vertices;
  if (hint >= verts.size()) hint = 0;
  std::uint32_t best = hint;
  double best_dot = verts[best].dot(dir);
  // A vertex with no strictly better neighbor maximizes a linear function
  // over a convex polytope.
  for (bool improved = true; improved;) {
    improved = false;
    for (const auto nb : neighbors(best)) {
      const double d = verts[nb].dot(dir);
      if (d > best_dot) {
        best_dot = d;
        best = nb;
        improved = true;
      }
    }
  }
  return best;
}

Vec3 ConvexHull::face_normal(std::size_t f) const {
  const auto& fc = data_->faces[f];
  const auto& v = data_->vertices;
  return (v[fc[1]] - v[fc[0]]).cross(v[fc[2]] - v[fc[0]]).normalized();
}

double ConvexHull::face_offset(std::size_t f) const {
  return face_normal(f).dot(data_->vertices[data_->faces[f][0]]);
}

double ConvexHull::volume() const {
  if (empty()) return 0.0;
  const auto& v = data_->vertices;
  const Vec3 c = v.front();
  double vol = 0.0;
  for (const auto& f : data_->faces) vol += (v[f[0]] - c).dot((v[f[1]] - c).cross(v[f[2]] - c));
  return vol / 6.0;
}

namespace {

struct SupportVisitor {
  Vec3 local_dir;

  Vec3 operator()(const Sphere& s) const { return local_dir.normalized() * s.radius; }
  Vec3 operator()(const Box& b) const {
    return {std::copysign(b.half_extents.x(), local_dir.x()), std::copysign(b.half_extents.y(), local_dir.y()),
            std::copysign(b.half_extents.z(), local_dir.z())};
  }
  Vec3 operator()(const Capsule& c) const {
    const Vec3& core = local_dir.dot(c.p1 - c.p0) > 0.0 ? c.p1 : c.p0;
    return core + local_dir.normalized() * c.radius;
  }
  Vec3 operator()(const ConvexHull& h) const { return h.vertices()[h.support_index(local_dir)]; }
};

}  // namespace

Vec3 support_point(const Shape& shape, const Vec3& dir, const RigidTransform& tf) {
  if (!(dir.squaredNorm() > 0.0)) throw Error("support_point: zero direction");
  const Vec3 local = tf.apply_inverse_rotation(dir);
  return tf.apply(std::visit(SupportVisitor{local}, shape));
}

Aabb capsule_aabb(const Capsule& c) {
  Aabb box;
  box.extend(c.p0);
  box.extend(c.p1);
  return box.inflated(c.radius);
}

Aabb world_aabb(const Shape& shape, const RigidTransform& tf) {
  struct Visitor {
    const RigidTransform& tf;
    Aabb operator()(const Sphere& s) const { return Aabb{tf.translation, tf.translation}.inflated(s.radius); }
    Aabb operator()(const Box& b) const {
      const Eigen::Matrix3d r = tf.rotation.toRotationMatrix().cwiseAbs();
      const Vec3 e = r * b.half_extents;
      return {tf.translation - e, tf.translation + e};
    }
    Aabb operator()(const Capsule& c) const { return capsule_aabb(c.transformed(tf)); }
    Aabb operator()(const ConvexHull& h) const {
      const Aabb& l = h.local_aabb();
      const Vec3 center = 0.5 * (l.min + l.max);
      const Vec3 half = 0.5 * (l.max - l.min);
      const Eigen::Matrix3d r = tf.rotation.toRotationMatrix().cwiseAbs();
      const Vec3 c = tf.apply(center);
      const Vec3 e = r * half;
      return {c - e, c + e};
    }
  };
  return std::visit(Visitor{tf}, shape);
}

}  // namespace cik

#include "collision_ik/collision/quickhull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "collision_ik/error.hpp"

namespace cik {

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

struct HullFace {
  std::array<std::uint32_t, 3> v{};
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
  std::vector<std::uint32_t> outside;
  std::uint32_t far_point = kNone;
  double far_dist = 0.0;
  bool alive = true;
  bool visible = false;

  double distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

class QuickHullBuilder {
 public:
  explicit QuickHullBuilder(std::span<const Vec3> pts) : pts_(pts) {
    double scale = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      double m = 0.0;
      for (const auto& p : pts_) m = std::max(m, std::abs(p[axis]));
      scale += m;
    }
    eps_ = std::max(scale, 1e-300) * 1e-9;
  }

  ConvexHull build() {
    initial_simplex();
    while (!work_.empty()) {
      const std::uint32_t f = work_.back();
      work_.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f);
    }
    return extract();
  }

 private:
  std::uint32_t make_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    HullFace face;
    face.v = {a, b, c};
    const Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = n.norm();
    face.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    face.offset = face.normal.dot(pts_[a]);
    const auto id = static_cast<std::uint32_t>(faces_.size());
    faces_.push_back(std::move(face));
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  // Assigns p to whichever candidate face it lies farthest above; points
  // above none are interior and dropped.
  void assign(std::uint32_t p, std::span<const std::uint32_t> candidates) {
    std::uint32_t best = kNone;
    double best_d = eps_;
    for (const auto f : candidates) {
      const double d = faces_[f].distance(pts_[p]);
      if (d > best_d) {
        best_d = d;
        best = f;
      }
    }
    if (best == kNone) return;
    auto& face = faces_[best];
    face.outside.push_back(p);
    if (best_d > face.far_dist) {
      face.far_dist = best_d;
      face.far_point = p;
    }
  }

  void initial_simplex() {
    const auto n = static_cast<std::uint32_t>(pts_.size());
    if (n < 4) throw DegenerateInputError("convex_hull: need at least 4 points, got " + std::to_string(n));

    std::array<std::uint32_t, 6> extremes{};
    for (int axis = 0; axis < 3; ++axis) {
      std::uint32_t lo = 0, hi = 0;
      for (std::uint32_t i = 1; i < n; ++i) {
        if (pts_[i][axis] < pts_[lo][axis]) lo = i;
        if (pts_[i][axis] > pts_[hi][axis]) hi = i;
      }
      extremes[2 * axis] = lo;
      extremes[2 * axis + 1] = hi;
    }
    std::uint32_t i0 = 0, i1 = 0;
    double best = -1.0;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) {
        const double d = (pts_[extremes[a]] - pts_[extremes[b]]).squaredNorm();
        if (d > best) {
          best = d;
          i0 = extremes[a];
          i1 = extremes[b];
        }
      }
    if (std::sqrt(best) <= eps_) throw DegenerateInputError("convex_hull: all points coincide");

    const Vec3 dir = (pts_[i1] - pts_[i0]).normalized();
    std::uint32_t i2 = kNone;
    best = eps_;
    for (std::uint32_t i = 0; i < n; ++i) {
      const Vec3 r = pts_[i] - pts_[i0];
      const double d = (r - dir * r.dot(dir)).norm();
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (i2 == kNone) throw DegenerateInputError("convex_hull: points are collinear");

    const Vec3 normal = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    std::uint32_t i3 = kNone;
    best = eps_;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double d = std::abs(normal.dot(pts_[i] - pts_[i0]));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (i3 == kNone) throw DegenerateInputError("convex_hull: points are coplanar");

    // Wind the tetrahedron so every face normal points away from the fourth vertex.
    if (normal.dot(pts_[i3] - pts_[i0]) > 0.0) std::swap(i1, i2);
    const std::array<std::uint32_t, 4> f = {make_face(i0, i1, i2), make_face(i0, i3, i1), make_face(i1, i3, i2),
                                            make_face(i2, i3, i0)};
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, f);
    }
    for (const auto id : f)
      if (!faces_[id].outside.empty()) work_.push_back(id);
  }

  void add_point(std::uint32_t start) {
    const std::uint32_t eye = faces_[start].far_point;
    const Vec3& p = pts_[eye];

    // Flood the visible region and collect its horizon.
    std::vector<std::uint32_t> visible{start};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
    faces_[start].visible = true;
    std::vector<std::uint32_t> stack{start};
    while (!stack.empty()) {
      const std::uint32_t f = stack.back();
      stack.pop_back();
      const auto v = faces_[f].v;
      for (int k = 0; k < 3; ++k) {
        const std::uint32_t a = v[k], b = v[(k + 1) % 3];
        const std::uint32_t nb = edges_.at(edge_key(b, a));
        if (faces_[nb].visible) continue;
        if (faces_[nb].distance(p) > eps_) {
          faces_[nb].visible = true;
          visible.push_back(nb);
          stack.push_back(nb);
        }
      }
    }
    for (const auto f : visible) {
      const auto v = faces_[f].v;
      for (int k = 0; k < 3; ++k) {
        const std::uint32_t a = v[k], b = v[(k + 1) % 3];
        if (!faces_[edges_.at(edge_key(b, a))].visible) horizon.emplace_back(a, b);
      }
    }

    std::vector<std::uint32_t> orphans;
    for (const auto f : visible) {
      auto& face = faces_[f];
      for (const auto q : face.outside)
        if (q != eye) orphans.push_back(q);
      face.outside.clear();
      face.outside.shrink_to_fit();
      face.alive = false;
      for (int k = 0; k < 3; ++k) edges_.erase(edge_key(face.v[k], face.v[(k + 1) % 3]));
    }

    std::vector<std::uint32_t> created;
    created.reserve(horizon.size());
    for (const auto& [a, b] : horizon) created.push_back(make_face(a, b, eye));
    for (const auto q : orphans) assign(q, created);
    for (const auto id : created)
      if (!faces_[id].outside.empty()) work_.push_back(id);
  }

  ConvexHull extract() const {
    std::vector<std::uint32_t> remap(pts_.size(), kNone);
    std::vector<Vec3> verts;
    std::vector<ConvexHull::Face> faces;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      ConvexHull::Face out{};
      for (int k = 0; k < 3; ++k) {
        auto& r = remap[f.v[k]];
        if (r == kNone) {
          r = static_cast<std::uint32_t>(verts.size());
          verts.push_back(pts_[f.v[k]]);
        }
        out[k] = r;
      }
      faces.push_back(out);
    }
    return ConvexHull(std::move(verts), std::move(faces));
  }

  std::span<const Vec3> pts_;
  double eps_ = 0.0;
  std::vector<HullFace> faces_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::uint32_t> work_;
};

}  // namespace

ConvexHull convex_hull(std::span<const Vec3> points) { return QuickHullBuilder(points).build(); }

}  // namespace cik

#include "collision_ik/collision/distance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace cik {

namespace {

std::atomic<std::uint64_t> g_fallbacks{0};

// Polytope core of a shape plus the radius swept around it.
struct Core {
  const Shape* shape;
  RigidTransform tf;
  double radius;
  mutable std::uint32_t hint = 0;

  Vec3 support(const Vec3& dir) const {
    const Vec3 local = tf.apply_inverse_rotation(dir);
    Vec3 p;
    switch (shape->index()) {
      case 0:
        p = Vec3::Zero();
        break;
      case 1: {
        const auto& h = std::get<Box>(*shape).half_extents;
        p = {local.x() >= 0 ? h.x() : -h.x(), local.y() >= 0 ? h.y() : -h.y(), local.z() >= 0 ? h.z() : -h.z()};
        break;
      }
      case 2: {
        const auto& c = std::get<Capsule>(*shape);
        p = local.dot(c.p1 - c.p0) > 0.0 ? c.p1 : c.p0;
        break;
      }
      default: {
        const auto& hull = std::get<ConvexHull>(*shape);
        hint = hull.support_index(local, hint);
        p = hull.vertices()[hint];
      }
    }
    return tf.apply(p);
  }

  Vec3 center() const {
    switch (shape->index()) {
      case 2: {
        const auto& c = std::get<Capsule>(*shape);
        return tf.apply(0.5 * (c.p0 + c.p1));
      }
      case 3: {
        const auto& l = std::get<ConvexHull>(*shape).local_aabb();
        return tf.apply(0.5 * (l.min + l.max));
      }
      default:
        return tf.translation;
    }
  }
};

Core make_core(const Shape& s, const RigidTransform& tf) {
  double r = 0.0;
  if (const auto* sp = std::get_if<Sphere>(&s)) r = sp->radius;
  if (const auto* cp = std::get_if<Capsule>(&s)) r = cp->radius;
  return {&s, tf, r};
}

// Minkowski-difference vertex w = a - b, remembering its witnesses.
struct Vertex {
  Vec3 w, a, b;
};

struct Simplex {
  std::array<Vertex, 4> v;
  std::array<double, 4> bary{};
  int size = 0;

  Vec3 closest() const {
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < size; ++i) p += bary[i] * v[i].w;
    return p;
  }
  void witnesses(Vec3& pa, Vec3& pb) const {
    pa.setZero();
    pb.setZero();
    for (int i = 0; i < size; ++i) {
      pa += bary[i] * v[i].a;
      pb += bary[i] * v[i].b;
    }
  }
  void keep(std::initializer_list<int> idx, std::initializer_list<double> weights) {
    std::array<Vertex, 4> nv;
    std::array<double, 4> nb{};
    int k = 0;
    auto wi = weights.begin();
    for (const int i : idx) {
      nv[k] = v[i];
      nb[k] = *wi++;
      ++k;
    }
    v = nv;
    bary = nb;
    size = k;
  }
};

// Closest point to the origin on segment v0-v1; reduces the simplex.
void solve_segment(Simplex& s, int i0, int i1) {
  const Vec3 a = s.v[i0].w, b = s.v[i1].w;
  const Vec3 ab = b - a;
  const double denom = ab.squaredNorm();
  double t = denom > 0.0 ? -a.dot(ab) / denom : 0.0;
  if (t <= 0.0) {
    s.keep({i0}, {1.0});
  } else if (t >= 1.0) {
    s.keep({i1}, {1.0});
  } else {
    s.keep({i0, i1}, {1.0 - t, t});
  }
}

// Voronoi-region closest point on triangle (after Ericson).
void solve_triangle(Simplex& s, int i0, int i1, int i2) {
  const Vec3 a = s.v[i0].w, b = s.v[i1].w, c = s.v[i2].w;
  const Vec3 ab = b - a, ac = c - a, ap = -a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return s.keep({i0}, {1.0});
  const Vec3 bp = -b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return s.keep({i1}, {1.0});
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return s.keep({i0, i1}, {1.0 - t, t});
  }
  const Vec3 cp = -c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return s.keep({i2}, {1.0});
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return s.keep({i0, i2}, {1.0 - t, t});
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return s.keep({i1, i2}, {1.0 - t, t});
  }
  const double sum = va + vb + vc;
  if (!(sum > 0.0)) {
    // Degenerate (collinear) triangle: fall back to its best edge.
    Simplex best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : {std::pair{i0, i1}, std::pair{i1, i2}, std::pair{i0, i2}}) {
      Simplex t = s;
      solve_segment(t, p, q);
      const double d = t.closest().squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = t;
      }
    }
    s = best;
    return;
  }
  const double inv = 1.0 / sum;
  s.keep({i0, i1, i2}, {va * inv, vb * inv, vc * inv});
}

// Returns true if the origin lies inside the tetrahedron.
bool solve_tetrahedron(Simplex& s) {
  const Vec3 a = s.v[0].w, b = s.v[1].w, c = s.v[2].w, d = s.v[3].w;
  const double vol = (b - a).dot((c - a).cross(d - a));
  struct FaceTest {
    int i, j, k, opp;
  };
  const std::array<FaceTest, 4> faces = {{{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 3, 1}, {1, 2, 3, 0}}};
  const bool degenerate = std::abs(vol) <= 1e-18 * std::max(1.0, (b - a).squaredNorm() * (c - a).norm());

  Simplex best;
  double best_d = std::numeric_limits<double>::infinity();
  bool outside_any = false;
  for (const auto& f : faces) {
    const Vec3 p = s.v[f.i].w, q = s.v[f.j].w, r = s.v[f.k].w, o = s.v[f.opp].w;
    const Vec3 n = (q - p).cross(r - p);
    const double side_origin = n.dot(-p);
    const double side_opp = n.dot(o - p);
    if (!degenerate && side_origin * side_opp >= 0.0) continue;  // origin on the inner side of this face
    outside_any = true;
    Simplex t = s;
    solve_triangle(t, f.i, f.j, f.k);
    const double dd = t.closest().squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = t;
    }
  }
  if (!outside_any) return true;
  s = best;
  return false;
}

double sampling_estimate(const Core& ca, const Core& cb) {
  // Support pairs over a Fibonacci sphere of directions.
  constexpr int kSamples = 512;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / kSamples;
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 d(r * std::cos(golden * i), r * std::sin(golden * i), z);
    best = std::min(best, (ca.support(-d) - cb.support(d)).norm());
  }
  return best;
}

// Closest points between segments [p0, p1] and [q0, q1] (either may be a
// point), after Ericson's clamped parametric form.
void closest_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1, Vec3& cp, Vec3& cq) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  constexpr double kTiny = 1e-30;
  double s = 0.0, t = 0.0;
  if (a <= kTiny && e <= kTiny) {
    // both points
  } else if (a <= kTiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kTiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  cp = p0 + d1 * s;
  cq = q0 + d2 * t;
}

// World segment of a sphere or capsule core.
void core_segment(const Shape& s, const RigidTransform& tf, Vec3& p0, Vec3& p1) {
  if (const auto* c = std::get_if<Capsule>(&s)) {
    p0 = tf.apply(c->p0);
    p1 = tf.apply(c->p1);
  } else {
    p0 = p1 = tf.translation;
  }
}

bool swept_segment(const Shape& s) { return s.index() == 0 || s.index() == 2; }

}  // namespace

DistanceResult distance_query(const Shape& a, const RigidTransform& ta, const Shape& b, const RigidTransform& tb,
                              const DistanceSettings& settings) {
  const Core ca = make_core(a, ta);
  const Core cb = make_core(b, tb);
  DistanceResult result;

  if (swept_segment(a) && swept_segment(b)) {
    Vec3 a0, a1, b0, b1, pa, pb;
    core_segment(a, ta, a0, a1);
    core_segment(b, tb, b0, b1);
    closest_segment_segment(a0, a1, b0, b1, pa, pb);
    const double core = (pb - pa).norm();
    const double d = core - ca.radius - cb.radius;
    if (d <= 0.0) return result;
    const Vec3 n = (pb - pa) / core;
    result.distance = d;
    result.point_a = pa + n * ca.radius;
    result.point_b = pb - n * cb.radius;
    return result;
  }

  Vec3 dir = ca.center() - cb.center();
  if (dir.squaredNorm() < 1e-24) dir = Vec3::UnitX();
  Simplex s;
  {
    const Vec3 pa = ca.support(-dir), pb = cb.support(dir);
    s.v[0] = {pa - pb, pa, pb};
    s.bary[0] = 1.0;
    s.size = 1;
  }
  Vec3 v = s.v[0].w;
  double v2 = v.squaredNorm();
  double lower = 0.0;
  bool intersect = false;
  bool exact = false;

  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    if (v2 <= 1e-24) {
      intersect = true;
      break;
    }
    const Vec3 pa = ca.support(-v), pb = cb.support(v);
    const Vec3 w = pa - pb;
    const double vw = v.dot(w);
    lower = std::max(lower, vw / std::sqrt(v2));
    // Exact feature found, or the new vertex is already in the simplex.
    if (v2 - vw <= 1e-12 * v2) {
      exact = true;
      break;
    }
    bool duplicate = false;
    for (int i = 0; i < s.size; ++i) duplicate = duplicate || (s.v[i].w - w).squaredNorm() <= 1e-28;
    if (duplicate) {
      exact = true;
      break;
    }
    s.v[s.size] = {w, pa, pb};
    ++s.size;
    switch (s.size) {
      case 2:
        solve_segment(s, 0, 1);
        break;
      case 3:
        solve_triangle(s, 0, 1, 2);
        break;
      default:
        if (solve_tetrahedron(s)) {
          intersect = true;
          v2 = 0.0;
        }
    }
    if (intersect) break;
    const Vec3 nv = s.closest();
    const double nv2 = nv.squaredNorm();
    if (nv2 >= v2) {
      // No progress: rounding floor reached.
      exact = v2 - lower * lower <= 2.0 * settings.tolerance * std::sqrt(v2);
      break;
    }
    v = nv;
    v2 = nv2;
  }
  result.iterations = it;

  const double radii = ca.radius + cb.radius;
  if (intersect) {
    result.distance = 0.0;
    return result;
  }
  double core = std::sqrt(v2);
  result.converged = exact || (core - lower) <= settings.tolerance;
  if (!result.converged) {
    g_fallbacks.fetch_add(1, std::memory_order_relaxed);
    core = std::min(core, sampling_estimate(ca, cb));
  }
  Vec3 pa, pb;
  s.witnesses(pa, pb);
  const double d = core - radii;
  if (d <= 0.0) {
    result.distance = 0.0;
    return result;
  }
  const Vec3 n = (pb - pa).normalized();
  result.distance = d;
  result.point_a = pa + n * ca.radius;
  result.point_b = pb - n * cb.radius;
  return result;
}

std::uint64_t distance_fallback_count() { return g_fallbacks.load(std::memory_order_relaxed); }

}  // namespace cik

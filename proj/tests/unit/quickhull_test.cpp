#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "collision_ik/collision/quickhull.hpp"
#include "collision_ik/error.hpp"
#include "support/oracles.hpp"

namespace cik {
namespace {

std::vector<Vec3> cube_corners() {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1 ? 0.5 : -0.5, i & 2 ? 0.5 : -0.5, i & 4 ? 0.5 : -0.5);
  return pts;
}

// Largest signed distance of p outside any face (<= 0 means inside).
double outside_distance(const ConvexHull& h, const Vec3& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < h.faces().size(); ++f) worst = std::max(worst, h.face_normal(f).dot(p) - h.face_offset(f));
  return worst;
}

// Vertex v is extreme if some direction makes it the unique maximizer; the
// sum of adjacent face normals is such a direction on a convex polytope.
bool all_vertices_extreme(const ConvexHull& h) {
  const auto verts = h.vertices();
  std::vector<Vec3> normal_sum(verts.size(), Vec3::Zero());
  for (std::size_t f = 0; f < h.faces().size(); ++f)
    for (const auto v : h.faces()[f]) normal_sum[v] += h.face_normal(f);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec3 d = normal_sum[i].normalized();
    const double mine = verts[i].dot(d);
    for (std::size_t j = 0; j < verts.size(); ++j)
      if (j != i && verts[j].dot(d) >= mine - 1e-12) return false;
  }
  return true;
}

TEST(QuickHull, TetrahedronIsItsOwnHull) {
  const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const ConvexHull h = convex_hull(pts);
  EXPECT_EQ(h.vertices().size(), 4u);
  EXPECT_EQ(h.faces().size(), 4u);
  EXPECT_NEAR(h.volume(), 1.0 / 6.0, 1e-12);
}

TEST(QuickHull, CubeCenterIsCulled) {
  auto pts = cube_corners();
  pts.emplace_back(0, 0, 0);
  const ConvexHull h = convex_hull(pts);
  EXPECT_EQ(h.vertices().size(), 8u);
  for (const auto& v : h.vertices()) EXPECT_NEAR(v.cwiseAbs().maxCoeff(), 0.5, 0.0);
  EXPECT_NEAR(h.volume(), 1.0, 1e-12);
}

TEST(QuickHull, PointsOnCubeFacesAreNotVertices) {
  auto pts = cube_corners();
  for (int axis = 0; axis < 3; ++axis)
    for (double s : {-0.5, 0.5}) {
      Vec3 p = Vec3::Zero();
      p[axis] = s;
      pts.push_back(p);
    }
  EXPECT_EQ(convex_hull(pts).vertices().size(), 8u);
}

TEST(QuickHull, RejectsDegenerateClouds) {
  EXPECT_THROW(convex_hull(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), DegenerateInputError);
  EXPECT_THROW(convex_hull(std::vector<Vec3>{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {-1, -1, -1}}),
               DegenerateInputError);
  std::vector<Vec3> planar;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) planar.emplace_back(u(rng), u(rng), 0.25);
  EXPECT_THROW(convex_hull(planar), DegenerateInputError);
  EXPECT_THROW(convex_hull(std::vector<Vec3>(10, Vec3(1, 2, 3))), DegenerateInputError);
}

TEST(QuickHull, BallCloudIsContainedAndExtreme) {
  std::mt19937_64 rng(42);
  const auto pts = oracle::random_ball_points(1000, rng);
  const ConvexHull h = convex_hull(pts);
  EXPECT_LE(h.vertices().size(), pts.size());
  for (const auto& p : pts) ASSERT_LE(outside_distance(h, p), 1e-7);
  EXPECT_LE(h.volume(), 4.0 / 3.0 * M_PI);
  EXPECT_GT(h.volume(), 0.0);
  EXPECT_TRUE(all_vertices_extreme(h));
  // Euler characteristic of a closed triangulated sphere.
  EXPECT_EQ(static_cast<long>(h.vertices().size()) - static_cast<long>(h.faces().size()) / 2, 2);
}

TEST(QuickHull, PropertyRandomCloudsAreClosedContainedAndExtreme) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + rng() % 300;
    std::vector<Vec3> pts;
    const Vec3 scale(0.1 + std::abs(u(rng)), 0.1 + std::abs(u(rng)), 0.1 + std::abs(u(rng)));
    for (std::size_t i = 0; i < n; ++i) pts.push_back(Vec3(u(rng), u(rng), u(rng)).cwiseProduct(scale));
    const ConvexHull h = convex_hull(pts);
    for (const auto& p : pts) ASSERT_LE(outside_distance(h, p), 1e-7) << "trial " << trial;
    ASSERT_TRUE(all_vertices_extreme(h)) << "trial " << trial;
    // Every directed edge appears exactly once, paired with its reverse.
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& f : h.faces())
      for (int k = 0; k < 3; ++k) ASSERT_TRUE(edges.insert({f[k], f[(k + 1) % 3]}).second);
    for (const auto& [a, b] : edges) ASSERT_TRUE(edges.count({b, a}));
  }
}

TEST(QuickHull, IsIdempotentOnItsOwnVertices) {
  std::mt19937_64 rng(5);
  const auto pts = oracle::random_ball_points(500, rng);
  const ConvexHull h = convex_hull(pts);
  const std::vector<Vec3> verts(h.vertices().begin(), h.vertices().end());
  const ConvexHull again = convex_hull(verts);
  auto key = [](const Vec3& v) { return std::tuple(v.x(), v.y(), v.z()); };
  std::set<std::tuple<double, double, double>> a, b;
  for (const auto& v : h.vertices()) a.insert(key(v));
  for (const auto& v : again.vertices()) b.insert(key(v));
  EXPECT_EQ(a, b);
}

TEST(QuickHull, HillClimbingSupportMatchesExhaustiveScan) {
  std::mt19937_64 rng(17);
  const auto pts = oracle::random_ball_points(2000, rng);
  const ConvexHull h = convex_hull(pts);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 d = oracle::random_unit(rng);
    double best = -1e300;
    for (const auto& v : h.vertices()) best = std::max(best, v.dot(d));
    const auto idx = h.support_index(d, static_cast<std::uint32_t>(rng() % h.vertices().size()));
    EXPECT_NEAR(h.vertices()[idx].dot(d), best, 1e-12);
  }
}

}  // namespace
}  // namespace cik

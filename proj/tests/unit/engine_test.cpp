#include <cmath>

#include <gtest/gtest.h>

#include "collision_ik/error.hpp"
#include "collision_ik/harness/desk_robots.hpp"
#include "collision_ik/solver/engine.hpp"

namespace cik {
namespace {

EngineConfig deterministic(Variant v = Variant::Cik) {
  EngineConfig c;
  c.objective = variant_spec(ObjectiveSpec::defaults(), v);
  c.solver.time_budget_us = std::numeric_limits<double>::infinity();
  return c;
}

TEST(Variant, NamesAndSpecs) {
  for (auto v : {Variant::Cik, Variant::Cik3, Variant::CikA, Variant::RikAblated})
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_EQ(variant_from_string("rik"), Variant::RikAblated);
  EXPECT_FALSE(variant_from_string("ik").has_value());
  const auto std_spec = ObjectiveSpec::defaults();
  EXPECT_EQ(variant_spec(std_spec, Variant::Cik3).find(TermKind::EeOrientation), nullptr);
  EXPECT_EQ(variant_spec(std_spec, Variant::RikAblated).find(TermKind::EnvCollision), nullptr);
  EXPECT_EQ(variant_spec(std_spec, Variant::CikA).adaptive, AdaptivePolicy::CikA);
  EXPECT_EQ(variant_spec(std_spec, Variant::Cik).terms.size(), std_spec.terms.size());
}

TEST(Engine, HoldsStillWhenGoalIsCurrentPose) {
  const RobotModel model = desk_robot(6);
  const JointVector home = desk_home(model);
  const Pose goal = model.end_effector_pose(home);
  Engine engine(model, CollisionScene{}, deterministic(), home);
  for (int k = 1; k <= 100; ++k) {
    const TickResult r = engine.step(k * 0.008, goal);
    ASSERT_LE((r.solve.theta - home).lpNorm<Eigen::Infinity>(), 1e-4) << "tick " << k;
    EXPECT_TRUE(std::isinf(r.min_distance));
    EXPECT_TRUE(r.active_ids.empty());
  }
}

TEST(Engine, ConvergesAfterOneCentimeterGoalStep) {
  const RobotModel model = desk_robot(6);
  const JointVector home = desk_home(model);
  Pose goal = model.end_effector_pose(home);
  goal.position.x() += 0.01;
  Engine engine(model, CollisionScene{}, deterministic(), home);
  double prev = INFINITY;
  int k = 1;
  for (; k <= 400; ++k) {
    const TickResult r = engine.step(k * 0.008, goal);
    const double err = (model.end_effector_pose(r.solve.theta).position - goal.position).norm();
    ASSERT_LT(err, prev) << "tick " << k;
    prev = err;
    if (err < 1e-3) break;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Engine, StaysClearOfObstacleSweptThroughGoal) {
  const RobotModel model = desk_robot(6);
  const JointVector home = desk_home(model);
  const Pose goal = model.end_effector_pose(home);
  auto scene = [&] {
    CollisionScene s;
    // A sphere passing straight through the goal point along y.
    const RigidTransform from = RigidTransform::from_translation(goal.position + Vec3(0, -0.5, 0));
    CollisionObject ball{7, Sphere{0.05}, from, from, MotionScript::linear(Vec3(0, 0.25, 0))};
    s.add(ball);
    return s;
  };
  Engine cik(model, scene(), deterministic(Variant::Cik), home);
  Engine rik(model, scene(), deterministic(Variant::RikAblated), home);
  double cik_min = INFINITY, rik_min = INFINITY;
  for (int k = 1; k <= 500; ++k) {
    cik_min = std::min(cik_min, cik.step(k * 0.008, goal).min_distance);
    rik_min = std::min(rik_min, rik.step(k * 0.008, goal).min_distance);
  }
  EXPECT_GT(cik_min, 0.0);
  EXPECT_EQ(rik_min, 0.0);
}

TEST(Engine, SlowGoalGivesContinuousSolutions) {
  const RobotModel model = desk_robot(7);
  const JointVector home = desk_home(model);
  const Pose start = model.end_effector_pose(home);
  Engine engine(model, CollisionScene{}, deterministic(), home);
  JointVector prev = home;
  for (int k = 1; k <= 300; ++k) {
    // 0.8 mm per tick along a diagonal.
    const Pose goal{start.position + Vec3(0.8e-3, 0.0, -0.8e-3) / std::sqrt(2.0) * k, start.orientation};
    const TickResult r = engine.step(k * 0.008, goal);
    ASSERT_LE((r.solve.theta - prev).lpNorm<Eigen::Infinity>(), 0.1) << "tick " << k;
    prev = r.solve.theta;
  }
}

TEST(Engine, PipelineBookkeeping) {
  const RobotModel model = desk_robot(6);
  const JointVector home = desk_home(model);
  const Pose goal = model.end_effector_pose(home);
  CollisionScene scene;
  const RigidTransform far = RigidTransform::from_translation(Vec3(2, 0, 0.3));
  scene.add({1, Sphere{0.05}, far, far, MotionScript::linear(Vec3(-2.0, 0, 0))});
  Engine engine(model, std::move(scene), deterministic(), home);
  const TickResult first = engine.step(0.008, goal);
  EXPECT_TRUE(first.active_ids.empty());
  EXPECT_FALSE(first.active_changed);
  EXPECT_TRUE(std::isinf(first.warm_min_distance));
  bool entered = false;
  for (int k = 2; k <= 200 && !entered; ++k) {
    const TickResult r = engine.step(k * 0.008, goal);
    if (!r.active_ids.empty()) {
      entered = true;
      EXPECT_TRUE(r.active_changed);
      EXPECT_EQ(r.active_ids.front(), 1);
      EXPECT_LE(r.warm_min_distance, 1.0);
    }
  }
  EXPECT_TRUE(entered);
  EXPECT_NEAR(engine.scene().time(), engine.history().time(0), 1e-15);
  EXPECT_THROW(engine.step(engine.history().time(0), goal), Error);
}

TEST(Engine, AdaptiveVariantScalesOrientationWeight) {
  const RobotModel model = desk_robot(6);
  const JointVector home = desk_home(model);
  const Pose goal = model.end_effector_pose(home);
  CollisionScene scene;
  const RigidTransform near = RigidTransform::from_translation(goal.position + Vec3(0, 0.03 + 0.11, 0));
  scene.add({1, Sphere{0.03}, near, near, std::nullopt});
  Engine engine(model, std::move(scene), deterministic(Variant::CikA), home);
  const TickResult r = engine.step(0.008, goal);
  const double w = ObjectiveSpec::defaults().find(TermKind::EeOrientation)->weight;
  const double expect = w * adaptive_ramp(r.warm_min_distance, 0.02, 0.2);
  EXPECT_NEAR(r.orientation_weight, expect, 1e-12);
  EXPECT_LT(r.orientation_weight, w);
}

}  // namespace
}  // namespace cik

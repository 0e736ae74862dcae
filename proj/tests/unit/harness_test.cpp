#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "collision_ik/error.hpp"
#include "collision_ik/harness/desk_robots.hpp"
#include "collision_ik/harness/report.hpp"
#include "collision_ik/harness/scalability.hpp"
#include "collision_ik/harness/tasks.hpp"
#include "collision_ik/harness/trial.hpp"
#include "support/robots.hpp"

namespace cik {
namespace {

TaskParams short_run(double duration) {
  TaskParams p;
  p.duration = duration;
  return p;
}

TEST(DeskRobots, ShapesAndLookup) {
  for (int dof : {6, 7, 8}) {
    const RobotModel m = desk_robot(dof);
    EXPECT_EQ(m.dof(), dof);
    const JointVector h = desk_home(m);
    EXPECT_TRUE((h.array() >= m.lower_bounds().array()).all());
    EXPECT_TRUE((h.array() <= m.upper_bounds().array()).all());
    EXPECT_GT(self_min_distance(m.link_shapes(h)), 0.05);
    EXPECT_GT(manipulability(m, h), 0.01);
    EXPECT_EQ(resolve_robot("desk" + std::to_string(dof)).dof(), dof);
  }
  EXPECT_THROW(desk_robot(5), ValidationError);
  EXPECT_THROW(resolve_robot("/nonexistent/robot.json"), Error);
}

TEST(PointCloud, BlobIsDeterministic) {
  const auto a = blob_point_cloud(500, 0.1, 4);
  const auto b = blob_point_cloud(500, 0.1, 4);
  const auto c = blob_point_cloud(500, 0.1, 5);
  ASSERT_EQ(a.size(), 500u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a) EXPECT_LT(p.norm(), 0.2);
}

TEST(PointCloud, LoadsObjAndXyz) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto obj = dir / "cik_cloud_test.obj";
  const auto xyz = dir / "cik_cloud_test.xyz";
  const auto empty = dir / "cik_cloud_empty.obj";
  std::ofstream(obj) << "# cube corner\nv 1 2 3\nvn 0 0 1\nv -1 0.5 2\nf 1 2 1\n";
  std::ofstream(xyz) << "0 0 0\n1 1 1\n\n2 2 2\n";
  std::ofstream(empty) << "# nothing\n";
  const auto a = load_point_cloud(obj.string());
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1], Vec3(-1, 0.5, 2));
  EXPECT_EQ(load_point_cloud(xyz.string()).size(), 3u);
  EXPECT_THROW(load_point_cloud(empty.string()), ParseError);
  EXPECT_THROW(load_point_cloud((dir / "cik_missing.obj").string()), Error);
  std::filesystem::remove(obj);
  std::filesystem::remove(xyz);
  std::filesystem::remove(empty);
}

TEST(GoalTrajectory, InterpolatesAndClamps) {
  const Quat q0 = Quat::Identity();
  const Quat q1(Eigen::AngleAxisd(1.0, Vec3::UnitZ()));
  GoalTrajectory g{{1.0, 3.0}, {{Vec3(0, 0, 0), q0}, {Vec3(2, 0, 0), q1}}};
  g.validate();
  EXPECT_EQ(g.at(0.0).position, Vec3(0, 0, 0));
  EXPECT_EQ(g.at(9.0).position, Vec3(2, 0, 0));
  EXPECT_NEAR((g.at(2.0).position - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(rotation_angle_between(g.at(2.0).orientation, q0), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(g.path_length(), 2.0);
  GoalTrajectory bad{{1.0, 1.0}, g.poses};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Tasks, Examples) {
  const RobotModel m = desk_robot(6);
  const Pose home = m.end_effector_pose(desk_home(m));

  const TaskScript sq = build_task("square_tracing", m);
  EXPECT_NEAR(sq.goal.path_length(), 1.6, 1e-12);
  EXPECT_EQ(sq.ticks(), 2500u);
  EXPECT_NEAR((sq.goal.at(0.0).position - home.position).norm(), 0.0, 1e-12);
  EXPECT_NEAR((sq.goal.at(sq.duration).position - home.position).norm(), 0.0, 1e-12);

  const TaskScript rot = build_task("isolated_rotations", m);
  int quarter_turns = 0;
  for (std::size_t k = 1; k < rot.goal.poses.size(); ++k) {
    EXPECT_NEAR((rot.goal.poses[k].position - home.position).norm(), 0.0, 1e-12);
    const double a = rotation_angle_between(rot.goal.poses[k].orientation, rot.goal.poses[k - 1].orientation);
    if (a > 1e-9) {
      EXPECT_NEAR(a, M_PI / 2, 1e-12);
      ++quarter_turns;
    }
  }
  EXPECT_EQ(quarter_turns, 6);

  const TaskScript table = build_task("around_table", m);
  ASSERT_EQ(table.objects.front().id, kTableId);
  const auto& box = std::get<Box>(table.objects.front().shape);
  const Vec3 rel = table.goal.poses[1].position - table.objects.front().transform.translation;
  EXPECT_TRUE((rel.cwiseAbs().array() < box.half_extents.array()).all());

  EXPECT_THROW(build_task("juggling", m), ValidationError);
  TaskParams bad;
  bad.rate_hz = 0;
  EXPECT_THROW(build_task("square_tracing", m, bad), ValidationError);
}

TEST(Tasks, SeedControlsJitter) {
  const RobotModel m = desk_robot(7);
  for (const auto& name : task_names()) {
    const TaskScript a = build_task(name, m, {}, 3);
    const TaskScript b = build_task(name, m, {}, 3);
    const TaskScript c = build_task(name, m, {}, 4);
    EXPECT_EQ(a.initial, b.initial) << name;
    EXPECT_NE(a.initial, c.initial) << name;
    ASSERT_EQ(a.objects.size(), b.objects.size());
    for (std::size_t i = 0; i < a.objects.size(); ++i)
      EXPECT_EQ(a.objects[i].transform.translation, b.objects[i].transform.translation);
  }
}

TrialLog linear_log(const RobotModel& m, const JointVector& rate, int n, double dt) {
  TrialLog log;
  log.tick_period = dt;
  for (int k = 1; k <= n; ++k) {
    TickRecord r;
    r.t = k * dt;
    r.theta = rate * r.t;
    r.goal = m.end_effector_pose(r.theta);
    r.min_distance = k % 4 == 0 ? 0.0 : 0.5;
    r.latency_us = k;
    log.ticks.push_back(r);
  }
  return log;
}

TEST(Metrics, LinearMotionExample) {
  const RobotModel m = testing::planar_2r();
  const JointVector rate = (JointVector(2) << 0.3, -0.4).finished();
  TrialLog log = linear_log(m, rate, 100, 0.01);
  const RunMetrics x = compute_metrics(log, m);
  EXPECT_EQ(x.ticks, 100u);
  EXPECT_NEAR(x.mean_position_error, 0.0, 1e-12);
  EXPECT_NEAR(x.mean_rotation_error, 0.0, 1e-6);
  EXPECT_NEAR(x.mean_joint_velocity, 0.5, 1e-9);
  EXPECT_NEAR(x.mean_joint_acceleration, 0.0, 1e-6);
  EXPECT_NEAR(x.mean_joint_jerk, 0.0, 1e-3);
  EXPECT_EQ(x.env_collision_count, 25u);
  EXPECT_EQ(x.min_env_distance, 0.0);
  EXPECT_DOUBLE_EQ(x.latency_mean_us, 50.5);
  EXPECT_DOUBLE_EQ(x.latency_p99_us, 99.0);

  // Offsetting the last goal shows up only in the terminal error.
  log.ticks.back().goal.position += Vec3(0.03, 0.04, 0.0);
  EXPECT_NEAR(compute_metrics(log, m).terminal_position_error, 0.05, 1e-12);
}

TEST(Metrics, IdempotentAndValidated) {
  const RobotModel m = testing::planar_2r();
  TrialLog log = linear_log(m, JointVector::Constant(2, 0.2), 30, 0.008);
  const RunMetrics a = compute_metrics(log, m);
  const RunMetrics b = compute_metrics(log, m);
  EXPECT_EQ(a.mean_joint_jerk, b.mean_joint_jerk);
  EXPECT_EQ(a.mean_position_error, b.mean_position_error);
  EXPECT_EQ(a.singularity_count, b.singularity_count);

  TrialLog gap = log;
  gap.ticks[10].t += 0.004;
  EXPECT_THROW(compute_metrics(gap, m), ValidationError);
  EXPECT_THROW(compute_metrics(TrialLog{}, m), ValidationError);
}

TEST(Trial, FarObstaclesMakeCikMatchRik) {
  const RobotModel m = desk_robot(6);
  TaskScript task = build_task("square_tracing", m, short_run(1.0));
  for (auto& obj : task.objects) {
    obj.transform = obj.initial = RigidTransform::from_translation(Vec3(50, 0, 0));
    obj.motion.reset();
  }
  const TrialResult cik = run_trial(task, m, Variant::Cik, 0);
  const TrialResult rik = run_trial(task, m, Variant::RikAblated, 0);
  ASSERT_EQ(cik.log.ticks.size(), rik.log.ticks.size());
  ASSERT_FALSE(cik.log.aborted);
  for (std::size_t k = 0; k < cik.log.ticks.size(); ++k) {
    ASSERT_EQ(cik.log.ticks[k].active, 0u);
    EXPECT_LE((cik.log.ticks[k].theta - rik.log.ticks[k].theta).lpNorm<Eigen::Infinity>(), 1e-9) << k;
  }
}

TEST(Report, CsvShapeAndReruns) {
  const RobotModel m = desk_robot(6);
  auto rows = [&] {
    std::vector<ReportRow> out;
    for (Variant v : {Variant::Cik, Variant::RikAblated})
      for (std::uint64_t seed : {0u, 1u}) {
        TrialResult r = run_trial(build_task("around_table", m, short_run(0.5), seed), m, v, seed);
        r.log.robot = "desk6";
        out.push_back(report_row(r));
      }
    return out;
  };
  std::ostringstream a, b, summary;
  write_csv(a, rows());
  write_csv(b, rows());
  EXPECT_EQ(a.str(), b.str());

  std::istringstream in(a.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')), csv_columns().size() - 1);
  }
  EXPECT_EQ(lines, 5u);
  EXPECT_EQ(a.str().rfind("robot,task,variant,seed,", 0), 0u);

  const auto r = rows();
  write_summary(summary, r);
  EXPECT_NE(summary.str().find("\"latency_mean_us\""), std::string::npos);
}

TEST(Scalability, NoObstaclesNoCollisionTerm) {
  ScalabilityOptions o;
  o.obstacles = 0;
  o.duration = 0.2;
  o.dof = 6;
  const ScalabilityReport r = scalability_run(o);
  EXPECT_EQ(r.ticks, 25u);
  EXPECT_EQ(r.max_active, 0u);
  EXPECT_EQ(r.collision_term_max, 0.0);
  EXPECT_EQ(r.env_collision_count, 0u);
  EXPECT_LT(r.mean_position_error, 0.01);
}

TEST(Scalability, HullObstaclesStayWithinActiveCap) {
  ScalabilityOptions o;
  o.obstacles = 12;
  o.blob_vertices = 400;
  o.duration = 0.2;
  const ScalabilityReport r = scalability_run(o);
  EXPECT_TRUE(r.hulls);
  EXPECT_EQ(r.mesh_vertices, 400u);
  EXPECT_GT(r.hull_vertices_mean, 4.0);
  EXPECT_LE(r.max_active, 3u);
}

}  // namespace
}  // namespace cik

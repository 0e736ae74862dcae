#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "collision_ik/error.hpp"
#include "collision_ik/objective/objective.hpp"
#include "collision_ik/solver/solver.hpp"
#include "support/oracles.hpp"
#include "support/robots.hpp"

namespace cik {
namespace {

JointVector vec(std::initializer_list<double> v) {
  JointVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Bounds box(int n, double lo, double hi) { return {JointVector::Constant(n, lo), JointVector::Constant(n, hi)}; }

SolverSettings deterministic() {
  SolverSettings s;
  s.time_budget_us = std::numeric_limits<double>::infinity();
  return s;
}

double rosenbrock(const JointVector& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

TEST(FdGradient, Examples) {
  const auto g = fd_gradient([](const JointVector& x) { return x.squaredNorm(); }, vec({1, 2}), 1e-6);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], 4.0, 1e-6);
  EXPECT_EQ(fd_gradient([](const JointVector&) { return 3.0; }, vec({1, 2, 3}), 1e-6), JointVector::Zero(3));
}

TEST(FdGradient, OneSidedAtBoundsNeverProbesOutside) {
  const Bounds b = box(2, -1, 1);
  const ScalarField f = [&](const JointVector& x) {
    EXPECT_TRUE((x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all()) << x.transpose();
    return x[0] * x[0] * x[0] + 2 * x[1];
  };
  int evals = 0;
  const auto g = fd_gradient(f, vec({1.0, -1.0}), 1e-6, &b, std::numeric_limits<double>::quiet_NaN(), &evals);
  EXPECT_NEAR(g[0], 3.0, 1e-5);
  EXPECT_NEAR(g[1], 2.0, 1e-6);
  EXPECT_GT(evals, 0);
}

TEST(FdGradient, NonFiniteProbeThrows) {
  const ScalarField f = [](const JointVector& x) { return x[0] > 0.5 ? std::nan("") : x[0]; };
  EXPECT_THROW(fd_gradient(f, vec({0.5}), 1e-6), NonFiniteError);
}

TEST(Solver, InteriorQuadratic) {
  Solver solver(deterministic());
  const auto r = solver.solve([](const JointVector& x) { return (x - vec({0.3, 0.3})).squaredNorm(); },
                              vec({-0.8, 0.9}), box(2, -1, 1));
  EXPECT_NEAR(r.theta[0], 0.3, 1e-5);
  EXPECT_NEAR(r.theta[1], 0.3, 1e-5);
  EXPECT_EQ(r.reason, Termination::Tolerance);
}

TEST(Solver, OptimumClampedToActiveBounds) {
  Solver solver(deterministic());
  const auto r = solver.solve([](const JointVector& x) { return (x - vec({0.3, 0.3})).squaredNorm(); },
                              vec({-0.8, -0.5}), box(2, -1, 0.1));
  EXPECT_NEAR(r.theta[0], 0.1, 1e-5);
  EXPECT_NEAR(r.theta[1], 0.1, 1e-5);
  EXPECT_LE(r.theta.maxCoeff(), 0.1);
}

TEST(Solver, Rosenbrock) {
  Solver solver(deterministic());
  const auto r = solver.solve(rosenbrock, vec({-1.2, 1.0}), box(2, -2, 2));
  EXPECT_LE(r.value, 1e-6);
  EXPECT_LE(r.iterations, 100);
}

TEST(Solver, WarmStartOutsideBoundsIsProjected) {
  Solver solver(deterministic());
  const auto r = solver.solve([](const JointVector& x) { return x.squaredNorm(); }, vec({5.0, -5.0}), box(2, 1, 2));
  EXPECT_NEAR(r.theta[0], 1.0, 1e-12);
  EXPECT_NEAR(r.theta[1], 1.0, 1e-12);
}

TEST(Solver, NonFiniteWarmStartThrows) {
  Solver solver(deterministic());
  EXPECT_THROW(solver.solve([](const JointVector&) { return INFINITY; }, vec({0.0}), box(1, -1, 1)), NonFiniteError);
}

TEST(Solver, NonFiniteRegionRejectsStepButStaysFeasible) {
  Solver solver(deterministic());
  // Undefined beyond x = 0.4; the minimum of the defined part is at the edge.
  const ScalarField f = [](const JointVector& x) { return x[0] > 0.4 ? std::nan("") : (x[0] - 1) * (x[0] - 1); };
  const auto r = solver.solve(f, vec({0.0}), box(1, -1, 1));
  EXPECT_LE(r.value, 1.0);
  EXPECT_LE(r.theta[0], 0.4);
  EXPECT_GT(r.theta[0], 0.3);
}

TEST(Solver, PropertyMonotoneFeasibleDeterministic) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    const Eigen::MatrixXd q = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    const JointVector c = JointVector::NullaryExpr(n, [&] { return 2 * u(rng); });
    // Convex quadratic plus a wavy term so curvature varies.
    std::vector<double> trace;
    const ScalarField f = [&](const JointVector& x) {
      const JointVector d = x - c;
      const double v = d.dot(q * d) + 0.3 * std::sin(3 * x.sum());
      trace.push_back(v);
      return v;
    };
    const Bounds b = box(n, -1, 1);
    const JointVector warm = JointVector::NullaryExpr(n, [&] { return u(rng); });
    Solver s1(deterministic()), s2(deterministic());
    const double f0 = f(warm);
    const auto r1 = s1.solve(f, warm, b);
    const auto r2 = s2.solve(f, warm, b);
    EXPECT_LE(r1.value, f0);
    EXPECT_TRUE((r1.theta.array() >= b.lower.array()).all() && (r1.theta.array() <= b.upper.array()).all());
    EXPECT_EQ(r1.theta, r2.theta);
    EXPECT_EQ(r1.value, r2.value);
    EXPECT_EQ(r1.iterations, r2.iterations);
    EXPECT_DOUBLE_EQ(f(r1.theta), r1.value);
  }
}

TEST(Solver, AcceptedIteratesDecrease) {
  // With a one-iteration cap repeated, each warm start is the last answer.
  SolverSettings s = deterministic();
  s.max_iterations = 1;
  Solver solver(s);
  JointVector x = vec({-1.2, 1.0});
  double prev = rosenbrock(x);
  for (int i = 0; i < 60; ++i) {
    const auto r = solver.solve(rosenbrock, x, box(2, -2, 2));
    EXPECT_LE(r.value, prev);
    EXPECT_LE(r.iterations, 1);
    prev = r.value;
    x = r.theta;
  }
}

TEST(Solver, BudgetIsHonoured) {
  SolverSettings s;
  s.time_budget_us = 2000;
  s.gradient_tolerance = 1e-300;
  s.step_tolerance = 1e-300;
  s.max_iterations = 1000000;
  Solver solver(s);
  const ScalarField slow = [](const JointVector& x) {
    std::this_thread::sleep_for(std::chrono::microseconds(20));
    return rosenbrock(x) + 1e-3 * std::sin(1e3 * x[0]);
  };
  const auto r = solver.solve(slow, vec({-1.2, 1.0}), box(2, -2, 2));
  EXPECT_EQ(r.reason, Termination::TimeBudget);
  // One iteration is at most ~45 probes of 20 us.
  EXPECT_LE(r.wall_us, s.time_budget_us + 45 * 100);
}

TEST(Solver, IterationCapReason) {
  SolverSettings s = deterministic();
  s.max_iterations = 3;
  Solver solver(s);
  const auto r = solver.solve(rosenbrock, vec({-1.2, 1.0}), box(2, -2, 2));
  EXPECT_EQ(r.reason, Termination::IterationCap);
  EXPECT_EQ(r.iterations, 3);
}

TEST(Solver, MemoryPersistsUntilReset) {
  Solver solver(deterministic());
  solver.solve(rosenbrock, vec({-1.2, 1.0}), box(2, -2, 2));
  EXPECT_GT(solver.memory_size(), 0u);
  EXPECT_LE(solver.memory_size(), 10u);
  solver.reset_memory();
  EXPECT_EQ(solver.memory_size(), 0u);
}

TEST(Solver, FullObjectiveGradientMatchesSmallerStepOracle) {
  const auto model = testing::spatial_5r();
  SolveHistory history(4, 0.008);
  std::mt19937_64 rng(21);
  const auto spec = ObjectiveSpec::defaults();
  const Bounds b{model.lower_bounds(), model.upper_bounds()};
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    JointVector th(5);
    for (int i = 0; i < 5; ++i) th[i] = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    history.prime(th + JointVector::Constant(5, 0.01), 0.0);
    const Pose goal{model.end_effector_pose(th).position + oracle::random_unit(rng) * 0.1, oracle::random_quat(rng)};
    const std::vector<ActiveObstacle> active{
        {1, Sphere{0.05}, RigidTransform::from_translation(model.end_effector_pose(th).position + Vec3(0.2, 0, 0)), 0, 0}};
    const EvalContext ctx{model, history, &goal, active, 0.0};
    const ScalarField f = [&](const JointVector& x) { return objective(spec, ctx, x); };
    const JointVector g = fd_gradient(f, th, 1e-6, &b);
    // Independent central differences at half the step. Clamped contacts
    // make f large, so allow for cancellation error too.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f(th)) / 1e-6;
    for (int i = 0; i < 5; ++i) {
      JointVector p = th, m = th;
      p[i] += 5e-7;
      m[i] -= 5e-7;
      const double ref = (f(p) - f(m)) / 1e-6;
      if (std::abs(ref) > 1e-2) {
        EXPECT_NEAR(g[i], ref, 1e-3 * std::abs(ref) + roundoff) << "trial " << trial << " joint " << i;
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 50);
}

TEST(SolverSettings, ParseValidateDefaults) {
  const auto s = parse_solver_settings(R"({"max_iterations": 50, "time_budget_us": 2000})");
  EXPECT_EQ(s.max_iterations, 50);
  EXPECT_EQ(s.time_budget_us, 2000);
  EXPECT_EQ(s.fd_step, 1e-6);
  EXPECT_EQ(parse_solver_settings(R"({"solver": {"memory": 4}})").memory, 4);
  EXPECT_THROW(parse_solver_settings(R"({"gradient_tolerance": 0})"), ValidationError);
  EXPECT_THROW(parse_solver_settings(R"({"time_budget_us": -1})"), ValidationError);
  EXPECT_THROW(parse_solver_settings("[1"), ParseError);
  EXPECT_EQ(to_string(Termination::TimeBudget), "time_budget");
}

}  // namespace
}  // namespace cik

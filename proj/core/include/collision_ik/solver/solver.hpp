#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <string_view>

#include "collision_ik/robot_model.hpp"

namespace cik {

struct SolverSettings {
  int max_iterations = 100;
  double gradient_tolerance = 1e-5;  // infinity norm of the projected gradient
  double step_tolerance = 1e-8;      // infinity norm of an accepted step
  double time_budget_us = 5000.0;    // checked between iterations; inf disables
  double fd_step = 1e-6;
  int memory = 10;                   // curvature pairs

  void validate() const;
};

SolverSettings parse_solver_settings(std::string_view document);
SolverSettings load_solver_settings(const std::string& path);

enum class Termination { Tolerance, IterationCap, TimeBudget };
std::string_view to_string(Termination t);

struct Bounds {
  JointVector lower;
  JointVector upper;

  JointVector project(const JointVector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

struct SolveResult {
  JointVector theta;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  Termination reason = Termination::Tolerance;
  double wall_us = 0.0;
};

using ScalarField = std::function<double(const JointVector&)>;

/// Central differences, shortened on the side that would leave `bounds`
/// (one-sided at an active bound). `fx` may pass a known f(x).
/// Throws NonFiniteError if any probe is not finite.
JointVector fd_gradient(const ScalarField& f, const JointVector& x, double h, const Bounds* bounds = nullptr,
                        double fx = std::numeric_limits<double>::quiet_NaN(), int* evaluations = nullptr);

/// Box-constrained local minimizer: projected limited-memory quasi-Newton
/// steps with Armijo backtracking along the projection arc. Curvature pairs
/// persist across solves until reset_memory().
class Solver {
 public:
  explicit Solver(SolverSettings settings = {});

  /// Never returns a point worse than the projected warm start. Throws
  /// NonFiniteError if f is not finite at the warm start.
  SolveResult solve(const ScalarField& f, const JointVector& warm, const Bounds& bounds);

  void reset_memory() { pairs_.clear(); }
  std::size_t memory_size() const { return pairs_.size(); }
  const SolverSettings& settings() const { return settings_; }

 private:
  JointVector direction(const JointVector& g, const std::vector<bool>& fixed) const;

  SolverSettings settings_;
  std::deque<std::pair<JointVector, JointVector>> pairs_;  // (s, y), newest last
};

}  // namespace cik

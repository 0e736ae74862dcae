#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "collision_ik/solver/solver.hpp"
#include "collision_ik/transform.hpp"

namespace cik {

struct ScalabilityOptions {
  std::size_t obstacles = 4;
  /// Hull obstacles are built from this cloud; without one, spheres are
  /// used for up to four obstacles and generated blobs beyond that.
  std::optional<std::vector<Vec3>> mesh;
  bool force_hulls = false;
  std::size_t blob_vertices = 30000;
  double obstacle_size = 0.08;  // m, blob radius or sphere radius
  int dof = 7;
  double duration = 2.0;  // s
  double rate_hz = 125.0;
  std::uint64_t seed = 0;
  SolverSettings solver = [] {
    SolverSettings s;
    s.time_budget_us = std::numeric_limits<double>::infinity();
    return s;
  }();
};

struct ScalabilityReport {
  std::size_t obstacles = 0;
  bool hulls = false;
  std::size_t mesh_vertices = 0;   // per obstacle input
  double hull_vertices_mean = 0.0;
  double hull_build_ms_mean = 0.0;
  std::size_t ticks = 0;
  double solve_mean_us = 0.0;  // solver only
  double solve_p99_us = 0.0;
  double step_mean_us = 0.0;   // update + filter + solve
  std::size_t max_active = 0;
  double mean_position_error = 0.0;
  std::size_t env_collision_count = 0;
  double collision_term_max = 0.0;  // largest env collision chi seen at a solution
};

/// Places obstacles around a desk robot tracking a slow circle and times
/// each tick.
ScalabilityReport scalability_run(const ScalabilityOptions& options);

}  // namespace cik

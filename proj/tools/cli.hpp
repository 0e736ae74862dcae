#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collision_ik/harness/scalability.hpp"
#include "collision_ik/harness/tasks.hpp"
#include "collision_ik/harness/trial.hpp"
#include "collision_ik/solver/engine.hpp"

namespace cik::cli {

/// Exit status when an assertion scenario fails.
inline constexpr int kAssertionFailed = 2;

/// Optional settings document shared by the subcommands:
///   { "rate_hz": 100, "variant": "cik", "objective": {...}, "solver": {...} }
struct Settings {
  ObjectiveSpec objective = ObjectiveSpec::defaults();
  std::optional<SolverSettings> solver;
  std::optional<double> rate_hz;
  std::optional<Variant> variant;
};

Settings load_settings(const std::string& path);

/// Whitespace separated doubles; throws ParseError on anything else.
std::vector<double> parse_numbers(const std::string& text);
Pose parse_pose(const std::string& text);
Variant parse_variant(const std::string& name);

struct ServeArgs {
  std::string robot = "desk7";
  std::string scene;
  std::string settings;
  std::string address = "0.0.0.0";
  int port = 8765;
  double rate_hz = 0.0;  // 0: settings value, else 100
  std::string variant;
};

struct SolveOnceArgs {
  std::string robot = "desk7";
  std::string scene;
  std::string settings;
  std::string goal;
  std::string theta0;
  int ticks = 1;
};

struct BenchRunArgs {
  std::vector<std::string> tasks{"around_table", "square_tracing"};
  std::vector<std::string> robots{"desk6", "desk7", "desk8"};
  std::vector<std::string> variants{"cik", "rik"};
  int seeds = 10;
  std::uint64_t first_seed = 0;
  std::string out = "report.csv";
  std::string summary;
  std::string settings;
  TaskParams task;
};

struct BenchScaleArgs {
  ScalabilityOptions options;
  std::string mesh;
  std::string out;
};

int serve(const ServeArgs& args);
int solve_once(const SolveOnceArgs& args);
int bench_run(const BenchRunArgs& args);
int bench_scale(const BenchScaleArgs& args);

}  // namespace cik::cli

#include "collision_ik/harness/report.hpp"

#include <cstdio>
#include <map>
#include <tuple>

#include <json.hpp>

namespace cik {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

ReportRow report_row(const TrialResult& trial) {
  return {trial.log.robot, trial.log.task, trial.log.variant, trial.log.seed, trial.metrics, trial.log.aborted};
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "robot",           "task",           "variant",          "seed",
      "ticks",           "mean_position_error", "mean_rotation_error", "mean_joint_velocity",
      "mean_joint_acceleration", "mean_joint_jerk", "singularity_count", "self_collision_count",
      "env_collision_count", "terminal_position_error", "min_env_distance", "aborted"};
  return cols;
}

void write_csv(std::ostream& out, std::span<const ReportRow> rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    const RunMetrics& m = r.metrics;
    out << r.robot << ',' << r.task << ',' << r.variant << ',' << r.seed << ',' << m.ticks << ','
        << num(m.mean_position_error) << ',' << num(m.mean_rotation_error) << ',' << num(m.mean_joint_velocity) << ','
        << num(m.mean_joint_acceleration) << ',' << num(m.mean_joint_jerk) << ',' << m.singularity_count << ','
        << m.self_collision_count << ',' << m.env_collision_count << ',' << num(m.terminal_position_error) << ','
        << num(m.min_env_distance) << ',' << (r.aborted ? 1 : 0) << '\n';
  }
}

void write_summary(std::ostream& out, std::span<const ReportRow> rows) {
  using nlohmann::json;
  json trials = json::array();
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ReportRow*>> cells;
  for (const auto& r : rows) {
    trials.push_back({{"robot", r.robot},
                      {"task", r.task},
                      {"variant", r.variant},
                      {"seed", r.seed},
                      {"latency_mean_us", r.metrics.latency_mean_us},
                      {"latency_p99_us", r.metrics.latency_p99_us}});
    cells[{r.robot, r.task, r.variant}].push_back(&r);
  }
  json agg = json::array();
  for (const auto& [key, members] : cells) {
    const double n = static_cast<double>(members.size());
    auto mean = [&](auto field) {
      double s = 0.0;
      for (const auto* m : members) s += static_cast<double>(m->metrics.*field);
      return s / n;
    };
    std::size_t env = 0;
    for (const auto* m : members) env += m->metrics.env_collision_count;
    agg.push_back({{"robot", std::get<0>(key)},
                   {"task", std::get<1>(key)},
                   {"variant", std::get<2>(key)},
                   {"trials", members.size()},
                   {"mean_position_error", mean(&RunMetrics::mean_position_error)},
                   {"mean_rotation_error", mean(&RunMetrics::mean_rotation_error)},
                   {"mean_joint_jerk", mean(&RunMetrics::mean_joint_jerk)},
                   {"env_collision_count_total", env},
                   {"latency_mean_us", mean(&RunMetrics::latency_mean_us)}});
  }
  out << json{{"trials", trials}, {"cells", agg}}.dump(2) << '\n';
}

}  // namespace cik

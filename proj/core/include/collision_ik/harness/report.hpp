#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "collision_ik/harness/trial.hpp"

namespace cik {

struct ReportRow {
  std::string robot;
  std::string task;
  std::string variant;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  bool aborted = false;
};

ReportRow report_row(const TrialResult& trial);

/// One row per trial in a fixed column order. Latency is left out so that
/// reruns with the same inputs are byte-identical; see write_summary.
void write_csv(std::ostream& out, std::span<const ReportRow> rows);
const std::vector<std::string>& csv_columns();

/// JSON document: per-trial latency and per (robot, task, variant) means.
void write_summary(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace cik

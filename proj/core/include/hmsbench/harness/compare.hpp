#pragma once

#include "hmsbench/harness/runner.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmsbench::harness {

class CompareError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// What compare needs from one run.
struct RunSummary {
  std::string scenario;
  scenario::Category category = scenario::Category::None;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  kpi::KpiReport report;
};

struct ComparisonRow {
  std::string scenario;
  std::uint64_t seed = 0;
  /// Value and delta against the same-seed baseline, per measure column.
  std::map<std::string, std::pair<double, double>> cells;
};

struct DeltaStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonTable {
  std::string baseline;
  std::vector<std::string> columns;
  std::vector<ComparisonRow> rows;
  /// scenario -> column -> delta statistics
  std::map<std::string, std::map<std::string, DeltaStats>> per_scenario;
  std::vector<std::string> excluded;
};

/// Columns derived from the suite's selected measures.
std::vector<std::string> measure_columns(const std::vector<std::string>& measures);

/// KPI deltas of every ok run against the ok baseline run (category none)
/// with the same seed. Throws CompareError("no baseline") when no baseline
/// run exists, and when fewer than two ok runs are given.
ComparisonTable compare(const std::vector<RunSummary>& runs,
                        const std::vector<std::string>& measures);

std::string comparison_csv(const ComparisonTable& table);
std::string comparison_summary(const ComparisonTable& table);

/// Value of one comparison column in a report.
double column_value(const kpi::KpiReport& report, const std::string& column);

} // namespace hmsbench::harness

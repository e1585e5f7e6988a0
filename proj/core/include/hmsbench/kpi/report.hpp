#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmsbench::kpi {

struct OrderKpi {
  Tick release = 0;
  std::optional<Tick> completion;
  std::optional<Tick> due;
  /// completed, cancelled, scrapped or open
  std::string outcome = "open";
  Tick lead = 0;
  Tick tardiness = 0;

  bool operator==(const OrderKpi&) const = default;
};

struct MachineKpi {
  Tick busy = 0;
  Tick downtime = 0;
  double utilization = 0.0;

  bool operator==(const MachineKpi&) const = default;
};

/// count/mean/max of one FLOW2 data point name.
struct DataStat {
  std::uint64_t count = 0;
  double mean = 0.0;
  double max = 0.0;

  bool operator==(const DataStat&) const = default;
};

struct OrderCounts {
  std::uint64_t released = 0;
  std::uint64_t completed = 0;
  std::uint64_t cancelled = 0;
  std::uint64_t scrapped = 0;
  std::uint64_t reworked = 0;

  bool operator==(const OrderCounts&) const = default;
};

struct KpiReport {
  std::string run_id;
  std::string scenario_id;
  std::uint64_t seed = 0;
  bool valid = true;
  std::vector<std::string> issues;

  Tick makespan = 0;
  /// Completed orders per 1000 ticks.
  double throughput = 0.0;
  std::map<std::string, OrderKpi> orders;
  double lead_mean = 0.0;
  Tick lead_max = 0;
  Tick tardiness_total = 0;
  double tardiness_mean = 0.0;
  std::map<std::string, MachineKpi> machines;
  OrderCounts counts;
  bool conserved = true;
  std::map<std::string, DataStat> control_data;
  std::map<std::string, double> control_metrics;
  std::uint64_t duplicates = 0;
};

json report_to_json(const KpiReport& report);
KpiReport report_from_json(const json& document);

/// Canonical JSON text, newline terminated.
std::string report_document(const KpiReport& report);

/// Header and one row for the flat per-run CSV.
std::string csv_header();
std::string csv_row(const KpiReport& report);

/// Shortest text that parses back to `value`.
std::string format_number(double value);

/// Differences between two reports of the same run: counts and ticks must
/// match exactly, ratios within `tolerance` relative. Empty when
/// equivalent. Run metadata and issue texts are ignored.
std::vector<std::string> report_differences(const KpiReport& a, const KpiReport& b,
                                            double tolerance = 1e-9);

} // namespace hmsbench::kpi

#include "hmsbench/harness/compare.hpp"

#include <algorithm>
#include <sstream>

namespace hmsbench::harness {

using kpi::format_number;

std::vector<std::string> measure_columns(const std::vector<std::string>& measures) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> kColumns{
      {"makespan", {"makespan"}},
      {"throughput", {"throughput"}},
      {"lead_time", {"lead_mean", "lead_max"}},
      {"tardiness", {"tardiness_total"}},
      {"utilization", {"utilization_mean"}},
      {"downtime", {"downtime_total"}},
      {"counts", {"completed", "cancelled", "scrapped", "reworked"}},
      {"control", {"commands_issued", "reschedules"}},
  };
  std::vector<std::string> columns;
  for (const auto& [measure, cols] : kColumns) {
    if (std::find(measures.begin(), measures.end(), measure) != measures.end()) {
      columns.insert(columns.end(), cols.begin(), cols.end());
    }
  }
  return columns;
}

double column_value(const kpi::KpiReport& r, const std::string& column) {
  if (column == "makespan") {
    return static_cast<double>(r.makespan);
  }
  if (column == "throughput") {
    return r.throughput;
  }
  if (column == "lead_mean") {
    return r.lead_mean;
  }
  if (column == "lead_max") {
    return static_cast<double>(r.lead_max);
  }
  if (column == "tardiness_total") {
    return static_cast<double>(r.tardiness_total);
  }
  if (column == "utilization_mean" || column == "downtime_total") {
    double sum = 0.0;
    for (const auto& [_, m] : r.machines) {
      sum += column == "downtime_total" ? static_cast<double>(m.downtime) : m.utilization;
    }
    if (column == "utilization_mean" && !r.machines.empty()) {
      sum /= static_cast<double>(r.machines.size());
    }
    return sum;
  }
  if (column == "completed") {
    return static_cast<double>(r.counts.completed);
  }
  if (column == "cancelled") {
    return static_cast<double>(r.counts.cancelled);
  }
  if (column == "scrapped") {
    return static_cast<double>(r.counts.scrapped);
  }
  if (column == "reworked") {
    return static_cast<double>(r.counts.reworked);
  }
  auto it = r.control_metrics.find(column);
  return it == r.control_metrics.end() ? 0.0 : it->second;
}

ComparisonTable compare(const std::vector<RunSummary>& runs,
                        const std::vector<std::string>& measures) {
  ComparisonTable table;
  table.columns = measure_columns(measures);

  std::map<std::uint64_t, const RunSummary*> baseline;
  std::size_t ok = 0;
  for (const auto& run : runs) {
    if (run.status != RunStatus::Ok) {
      table.excluded.push_back(run_id(run.scenario, run.seed) + " (" +
                               std::string(to_string(run.status)) + ")");
      continue;
    }
    ++ok;
    if (run.category == scenario::Category::None) {
      if (!table.baseline.empty() && table.baseline != run.scenario) {
        throw CompareError("two baseline scenarios: " + table.baseline + " and " + run.scenario);
      }
      table.baseline = run.scenario;
      baseline[run.seed] = &run;
    }
  }
  if (baseline.empty()) {
    throw CompareError("no baseline");
  }
  if (ok < 2) {
    throw CompareError("compare needs at least two ok runs");
  }

  std::map<std::string, std::map<std::string, std::vector<double>>> deltas;
  for (const auto& run : runs) {
    if (run.status != RunStatus::Ok) {
      continue;
    }
    auto base = baseline.find(run.seed);
    if (base == baseline.end()) {
      throw CompareError("no baseline for seed " + std::to_string(run.seed));
    }
    ComparisonRow row;
    row.scenario = run.scenario;
    row.seed = run.seed;
    for (const auto& column : table.columns) {
      const double value = column_value(run.report, column);
      const double delta = value - column_value(base->second->report, column);
      row.cells.emplace(column, std::make_pair(value, delta));
      deltas[run.scenario][column].push_back(delta);
    }
    table.rows.push_back(std::move(row));
  }
  for (const auto& [scenario, columns] : deltas) {
    for (const auto& [column, values] : columns) {
      DeltaStats s;
      double sum = 0.0;
      for (double v : values) {
        sum += v;
      }
      s.mean = sum / static_cast<double>(values.size());
      s.min = *std::min_element(values.begin(), values.end());
      s.max = *std::max_element(values.begin(), values.end());
      table.per_scenario[scenario][column] = s;
    }
  }
  return table;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "scenario,seed";
  for (const auto& c : table.columns) {
    out << ',' << c << ",delta_" << c;
  }
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.scenario << ',' << row.seed;
    for (const auto& c : table.columns) {
      const auto& [value, delta] = row.cells.at(c);
      out << ',' << format_number(value) << ',' << format_number(delta);
    }
    out << '\n';
  }
  return out.str();
}

std::string comparison_summary(const ComparisonTable& table) {
  std::ostringstream out;
  out << "baseline: " << table.baseline << '\n';
  for (const auto& [scenario, columns] : table.per_scenario) {
    out << '\n' << scenario << '\n';
    for (const auto& column : table.columns) {
      const DeltaStats& s = columns.at(column);
      out << "  delta " << column << ": mean " << format_number(s.mean) << ", min "
          << format_number(s.min) << ", max " << format_number(s.max) << '\n';
    }
  }
  if (!table.excluded.empty()) {
    out << "\nexcluded:\n";
    for (const auto& e : table.excluded) {
      out << "  " << e << '\n';
    }
  }
  return out.str();
}

} // namespace hmsbench::harness

#pragma once

#include "hmsbench/il/taps.hpp"
#include "hmsbench/kpi/report.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>

namespace hmsbench::kpi {

class KpiError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunInfo {
  std::string run_id;
  std::string scenario_id;
  std::uint64_t seed = 0;
};

/// Streaming KPI accumulator fed by FLOW1, FLOW2 and FLOW7 taps. Knows
/// nothing of the shop model: machines and orders are whatever ids the
/// events carry.
class KpiEngine final : public il::TapSink {
public:
  explicit KpiEngine(RunInfo info);

  /// Duplicate (tag, time, seq) records are dropped and counted. A time
  /// regression within a tag or an unmatched interval marks the run
  /// invalid. Throws KpiError once the run is closed.
  void ingest(const il::TaggedRecord& record) override;

  void close() { closed_ = true; }
  bool closed() const { return closed_; }
  bool valid() const { return issues_.empty(); }
  std::uint64_t duplicates() const { return duplicates_; }

  /// Throws KpiError("finalize on open run") before close().
  KpiReport finalize() const;

private:
  void on_event(const emulation::SimEvent& event);
  void close_busy(const std::string& machine, Tick time);
  void invalidate(std::string issue);

  RunInfo info_;
  bool closed_ = false;
  std::vector<std::string> issues_;
  std::uint64_t duplicates_ = 0;
  std::set<std::tuple<int, Tick, std::uint64_t>> seen_;
  std::map<int, Tick> last_time_;

  struct MachineAcc {
    std::optional<Tick> busy_since;
    std::optional<Tick> down_since;
    /// Closed busy and down intervals.
    std::vector<std::pair<Tick, Tick>> busy;
    std::vector<std::pair<Tick, Tick>> down;
  };
  std::map<std::string, MachineAcc> machines_;
  std::map<std::string, OrderKpi> orders_;
  std::map<std::string, Tick> dues_;
  OrderCounts counts_;

  struct DataAcc {
    std::uint64_t count = 0;
    double sum = 0.0;
    double max = 0.0;
  };
  std::map<std::string, DataAcc> data_;
  std::map<std::string, double> metrics_;
};

/// Independent batch recomputation from a complete session log. Throws
/// KpiError("incomplete log") when the log lacks its closing bye and
/// KpiError("unmatched interval ...") for an op-finished without a start.
KpiReport recompute_from_log(std::string_view log_text, const RunInfo& info);

} // namespace hmsbench::kpi

#pragma once

#include "hmsbench/control/reference_control.hpp"
#include "hmsbench/harness/suite.hpp"
#include "hmsbench/il/taps.hpp"
#include "hmsbench/kpi/report.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hmsbench::harness {

enum class RunStatus : std::uint8_t { Ok, Invalid, Aborted };

std::string_view to_string(RunStatus status);

struct RunOptions {
  Tick cap = 1'000'000;
  std::uint64_t round_cap = 1'000'000;
  /// Measure decision latency on the wall clock. Off keeps every artifact
  /// byte-reproducible.
  bool timing = false;
  /// Feed the streaming KPI engine from the taps. Off computes the report
  /// from the session log alone.
  bool taps = true;
  /// Attach the scenario manager at all.
  bool scenario_manager = true;
  ControlDeployment deployment = ControlDeployment::InProcess;
  /// argv of the control process for ControlDeployment::Process.
  std::vector<std::string> control_command;
  std::chrono::milliseconds timeout{10'000};
  /// Sees every tapped record as well, whether or not `taps` is set. Not
  /// synchronized: attach to single runs only.
  il::TapSink* observer = nullptr;
};

struct RunRecord {
  std::string suite;
  std::string scenario;
  scenario::Category category = scenario::Category::None;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  std::string reason;
  std::string log_path;
  std::string report_path;
  /// Not written to artifacts.
  std::chrono::milliseconds wall_clock{0};
};

struct RunOutput {
  RunRecord record;
  kpi::KpiReport report;
  std::string session_log;
  std::string command_log;
  std::vector<std::string> warnings;
};

/// What one run needs; the suite supplies the rest.
struct RunSpec {
  std::string suite_name;
  const emulation::ShopModel* model = nullptr;
  std::string model_hash;
  const std::vector<control::ProductOrder>* orders = nullptr;
  const scenario::Scenario* scenario = nullptr;
  std::uint64_t seed = 0;
};

std::string run_id(std::string_view scenario_id, std::uint64_t seed);

/// Boots emulation, control, scenario manager and KPI engine for one
/// (scenario, seed) and runs rounds until quiescence or the tick cap.
RunOutput run_one(const RunSpec& spec, const RunOptions& options);

/// Every scenario against every seed, scenario-major. Results come back in
/// that order whatever `jobs` is.
std::vector<RunOutput> run_suite(const BenchmarkSuite& suite, const RunOptions& options,
                                 unsigned jobs = 1);

} // namespace hmsbench::harness

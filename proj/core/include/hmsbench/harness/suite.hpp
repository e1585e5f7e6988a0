#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/scenario/scenario.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::harness {

enum class ControlDeployment : std::uint8_t { InProcess, Process };

/// Measures a suite may select for comparison.
inline const std::vector<std::string> kKnownMeasures{
    "makespan", "throughput", "lead_time", "tardiness", "utilization", "downtime", "counts",
    "control"};

struct SuiteScenario {
  std::string path;
  std::string document;
  std::string sha256;
  scenario::Scenario scenario;
};

/// A loaded and validated benchmark suite with every referenced document
/// read into memory.
struct BenchmarkSuite {
  std::string name;
  std::string control = "reference";
  ControlDeployment deployment = ControlDeployment::InProcess;
  std::vector<std::string> measures;
  std::vector<std::uint64_t> seeds;
  Tick cap = 1'000'000;

  std::string model_path;
  std::string model_document;
  std::string model_hash;
  emulation::ShopModel model;

  std::string orders_path;
  std::string orders_document;
  std::string orders_hash;
  std::vector<control::ProductOrder> orders;

  std::vector<SuiteScenario> scenarios;
};

/// Reads a suite file; relative paths resolve against its directory.
/// Throws ValidationError for duplicate seeds ("duplicate seed 7"), an
/// empty scenario list, duplicate scenario ids, unknown measures or a
/// scenario entry naming a model document that differs from the suite's.
BenchmarkSuite load_suite(const std::string& path);

/// Same as load_suite with the file already read.
BenchmarkSuite parse_suite(std::string_view document, const std::string& base_dir);

} // namespace hmsbench::harness

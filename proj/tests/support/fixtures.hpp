#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/harness/runner.hpp"
#include "hmsbench/il/taps.hpp"
#include "hmsbench/scenario/scenario.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

std::string data_path(const std::string& relative);
std::string read(const std::string& relative);

const hmsbench::emulation::ShopModel& minicell();
const std::string& minicell_hash();
const std::vector<hmsbench::control::ProductOrder>& minicell_orders();

/// Scenario shipped under data/minicell/scenarios/<name>.json.
hmsbench::scenario::Scenario scenario(const std::string& name);
hmsbench::scenario::Scenario scenario_from(const std::string& document,
                                           const std::vector<hmsbench::control::ProductOrder>& orders);

inline const std::vector<std::string> kScenarioFiles{"null", "ps9", "rush-order", "reject-rework",
                                                     "supply-shortage"};

/// One run on MiniCell with the given scenario and order book.
hmsbench::harness::RunOutput run(const hmsbench::scenario::Scenario& sc, std::uint64_t seed,
                                 const std::vector<hmsbench::control::ProductOrder>& orders,
                                 hmsbench::harness::RunOptions options = {});
hmsbench::harness::RunOutput run(const std::string& scenario_file, std::uint64_t seed,
                                 hmsbench::harness::RunOptions options = {});

/// Random but valid MiniCell order book.
std::vector<hmsbench::control::ProductOrder> random_orders(std::mt19937_64& rng, int count);

/// Every SimEvent carried by notification batches of a session log.
std::vector<hmsbench::emulation::SimEvent> logged_events(const std::string& log);

/// Log lines, each without its newline.
std::vector<std::string> lines(const std::string& text);
std::string join(const std::vector<std::string>& lines);

/// Collects tapped records.
struct Recorder : hmsbench::il::TapSink {
  std::vector<hmsbench::il::TaggedRecord> records;
  void ingest(const hmsbench::il::TaggedRecord& r) override { records.push_back(r); }
};

/// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& name);

/// sha256 of every regular file below `dir`, keyed by relative path.
std::map<std::string, std::string> tree_hashes(const std::string& dir);

/// Runs the hmsbench CLI through the shell; returns its exit status.
/// Output goes to `output` when given.
int cli(const std::string& args, std::string* output = nullptr);

} // namespace fixtures

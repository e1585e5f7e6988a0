#include "hmsbench/common/hash.hpp"
#include "hmsbench/control/endpoint.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/harness/artifacts.hpp"
#include "hmsbench/harness/compare.hpp"
#include "hmsbench/harness/runner.hpp"
#include "hmsbench/harness/suite.hpp"
#include "hmsbench/scenario/scenario.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hmsbench;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kRunFailure = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hmsbench");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$ %v");
  const char* level = std::getenv("HMSBENCH_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw ValidationError("--seeds", "not a seed: '" + item + "'");
    }
    for (auto s : seeds) {
      if (s == value) {
        throw ValidationError("--seeds", "duplicate seed " + item);
      }
    }
    seeds.push_back(value);
  }
  if (seeds.empty()) {
    throw ValidationError("--seeds", "empty seed list");
  }
  return seeds;
}

struct RunArgs {
  std::string suite;
  std::string out;
  std::string seeds;
  std::int64_t cap = 0;
  bool force = false;
  unsigned jobs = 1;
  bool timing = false;
};

int cmd_run(const RunArgs& args) {
  harness::BenchmarkSuite suite = harness::load_suite(args.suite);
  if (!args.seeds.empty()) {
    suite.seeds = parse_seeds(args.seeds);
  }
  if (args.cap > 0) {
    suite.cap = args.cap;
  }
  harness::RunOptions options;
  options.cap = suite.cap;
  options.timing = args.timing;
  options.deployment = suite.deployment;
  if (suite.deployment == harness::ControlDeployment::Process) {
    options.control_command = {fs::read_symlink("/proc/self/exe").string(), "serve-control",
                               "--model", suite.model_path, "--orders", suite.orders_path};
    if (args.timing) {
      options.control_command.push_back("--timing");
    }
  }
  if (args.timing) {
    spdlog::warn("--timing measures wall-clock latency; artifacts will not be reproducible");
  }

  const std::string out = args.out.empty() ? "runs/" + suite.name : args.out;
  std::error_code ec;
  if (fs::exists(out, ec) && !fs::is_empty(out, ec) && !args.force) {
    spdlog::error("output directory {} is not empty (use --force)", out);
    return kInvalidInput;
  }

  spdlog::info("suite {}: {} scenarios x {} seeds", suite.name, suite.scenarios.size(),
               suite.seeds.size());
  const auto runs = harness::run_suite(suite, options, args.jobs);
  bool all_ok = true;
  for (const auto& r : runs) {
    const auto& rec = r.record;
    if (rec.status == harness::RunStatus::Ok) {
      spdlog::info("{} ok in {} ms", harness::run_id(rec.scenario, rec.seed),
                   rec.wall_clock.count());
    } else {
      all_ok = false;
      spdlog::error("{} {}: {}", harness::run_id(rec.scenario, rec.seed),
                    harness::to_string(rec.status), rec.reason);
    }
    for (const auto& w : r.warnings) {
      spdlog::debug("{}: {}", harness::run_id(rec.scenario, rec.seed), w);
    }
  }

  std::optional<harness::ComparisonTable> table;
  try {
    table = harness::compare(harness::summaries(runs), suite.measures);
  } catch (const harness::CompareError& e) {
    spdlog::warn("comparison skipped: {}", e.what());
  }
  try {
    harness::emit_artifacts(out, args.force, suite, options, runs, table);
  } catch (const harness::ArtifactError& e) {
    spdlog::error("{}", e.what());
    return kRunFailure;
  }
  std::cout << read_file((fs::path(out) / "summary.txt").string());
  spdlog::info("artifacts written to {}", out);
  return all_ok ? kOk : kRunFailure;
}

int cmd_compare(const std::string& dir) {
  std::vector<std::string> measures;
  const auto runs = harness::load_run_summaries(dir, &measures);
  const auto table = harness::compare(runs, measures);
  std::cout << harness::comparison_csv(table) << '\n' << harness::comparison_summary(table);
  return kOk;
}

std::string find_sibling(const fs::path& file, const std::string& name) {
  for (fs::path dir = file.parent_path(); !dir.empty(); dir = dir.parent_path()) {
    if (fs::exists(dir / name)) {
      return (dir / name).string();
    }
    if (dir == dir.parent_path()) {
      break;
    }
  }
  return {};
}

int cmd_validate(const std::string& path, std::string model_path, std::string orders_path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ValidationError(path, e.what());
  }
  const json doc = parse_document(text, path);
  if (doc.is_array()) {
    const auto orders = control::load_order_book(text);
    std::cout << path << ": valid order book, " << orders.size() << " orders\n";
    return kOk;
  }
  if (doc.is_object() && doc.contains("machines")) {
    const auto model = emulation::load_model(text);
    std::cout << path << ": valid model, " << model.machines.size() << " machines, "
              << model.nodes.size() << " nodes, sha256 " << sha256_hex(text) << '\n';
    return kOk;
  }
  if (doc.is_object() && doc.contains("assessment")) {
    const auto suite = harness::load_suite(path);
    std::cout << path << ": valid suite, " << suite.scenarios.size() << " scenarios x "
              << suite.seeds.size() << " seeds\n";
    return kOk;
  }
  if (doc.is_object() && doc.contains("rules")) {
    if (model_path.empty()) {
      model_path = find_sibling(path, "model.json");
    }
    if (orders_path.empty()) {
      orders_path = find_sibling(path, "orders.json");
    }
    if (model_path.empty()) {
      throw ValidationError("--model", "scenario validation needs a model document");
    }
    const auto model = emulation::load_model(read_file(model_path));
    const auto orders = orders_path.empty() ? std::vector<control::ProductOrder>{}
                                            : control::load_order_book(read_file(orders_path));
    const auto sc = scenario::load_scenario(text, scenario::ScenarioContext::from(model, orders));
    std::cout << path << ": valid scenario " << sc.id << " ("
              << scenario::to_string(sc.category) << "), " << sc.rules.size() << " rules\n";
    return kOk;
  }
  throw ValidationError("", "unrecognized document: expected a model, order book, scenario or suite");
}

int cmd_serve_control(const std::string& model_path, const std::string& orders_path, bool timing) {
  const std::string model_text = read_file(model_path);
  const auto model = emulation::load_model(model_text);
  const auto orders = control::load_order_book(read_file(orders_path));
  control::ReferenceControl control(model, orders,
                                    timing ? control::wall_clock() : control::LatencyClock{});
  il::SessionConfig config;
  config.role = il::Role::Control;
  config.model_hash = sha256_hex(model_text);
  config.timeout = std::chrono::hours(1);
  control::ControlEndpoint endpoint(control, config);
  il::FdTransport transport(0, 1);
  if (!endpoint.serve(transport)) {
    spdlog::error("session ended without bye");
    return kRunFailure;
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Benchmark harness for holonic manufacturing control"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark suite");
  run_cmd->add_option("suite", run.suite, "Suite document")->required();
  run_cmd->add_option("--out", run.out, "Output directory (default runs/<suite name>)");
  run_cmd->add_option("--seeds", run.seeds, "Comma separated seeds overriding the suite");
  run_cmd->add_option("--cap", run.cap, "Tick cap");
  run_cmd->add_flag("--force", run.force, "Write into a non-empty output directory");
  run_cmd->add_option("--jobs", run.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--timing", run.timing, "Measure wall-clock decision latency");

  std::string compare_dir;
  auto* compare_cmd = app.add_subcommand("compare", "Compare the runs in an artifact directory");
  compare_cmd->add_option("dir", compare_dir, "Artifact directory")->required();

  std::string validate_path;
  std::string validate_model;
  std::string validate_orders;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a model, order book, scenario or suite");
  validate_cmd->add_option("file", validate_path, "Document")->required();
  validate_cmd->add_option("--model", validate_model, "Model for scenario targets");
  validate_cmd->add_option("--orders", validate_orders, "Order book for scenario targets");

  std::string serve_model;
  std::string serve_orders;
  bool serve_timing = false;
  auto* serve_cmd =
      app.add_subcommand("serve-control", "Serve the reference control over stdin/stdout");
  serve_cmd->add_option("--model", serve_model, "Model document")->required();
  serve_cmd->add_option("--orders", serve_orders, "Order book")->required();
  serve_cmd->add_flag("--timing", serve_timing, "Measure wall-clock decision latency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*run_cmd) {
      return cmd_run(run);
    }
    if (*compare_cmd) {
      return cmd_compare(compare_dir);
    }
    if (*validate_cmd) {
      return cmd_validate(validate_path, validate_model, validate_orders);
    }
    return cmd_serve_control(serve_model, serve_orders, serve_timing);
  } catch (const ValidationError& e) {
    spdlog::error("invalid input: {}", e.what());
    return kInvalidInput;
  } catch (const harness::CompareError& e) {
    spdlog::error("{}", e.what());
    return kInvalidInput;
  } catch (const harness::ArtifactError& e) {
    spdlog::error("{}", e.what());
    return kInvalidInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRunFailure;
  }
}

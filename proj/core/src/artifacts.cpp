#include "hmsbench/harness/artifacts.hpp"

#include "hmsbench/common/hash.hpp"
#include "hmsbench/scenario/registry.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace hmsbench::harness {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ArtifactError("cannot write " + path.string());
  }
  out << text;
  out.close();
  if (!out) {
    throw ArtifactError("write failed: " + path.string());
  }
}

std::string file_name(const std::string& path) { return fs::path(path).filename().string(); }

std::string summary_text(const BenchmarkSuite& suite, const std::vector<RunOutput>& runs,
                         const std::optional<ComparisonTable>& table) {
  std::ostringstream out;
  out << "suite " << suite.name << ", control " << suite.control << ", model "
      << suite.model_hash.substr(0, 12) << '\n';
  out << runs.size() << " runs\n\n";
  for (const auto& r : runs) {
    out << run_id(r.record.scenario, r.record.seed) << ": " << to_string(r.record.status);
    if (r.record.status == RunStatus::Ok) {
      out << ", makespan " << r.report.makespan << ", completed " << r.report.counts.completed
          << '/' << r.report.counts.released;
    } else {
      out << " (" << r.record.reason << ')';
    }
    out << '\n';
  }
  out << '\n';
  if (table) {
    out << comparison_summary(*table);
  } else {
    out << "no baseline: comparison skipped\n";
  }
  return out.str();
}

} // namespace

json make_manifest(const BenchmarkSuite& suite, const RunOptions& options,
                   const std::vector<RunOutput>& runs) {
  json scenarios = json::array();
  for (const auto& sc : suite.scenarios) {
    scenarios.push_back({{"id", sc.scenario.id},
                         {"category", std::string(scenario::to_string(sc.scenario.category))},
                         {"file", file_name(sc.path)},
                         {"sha256", sc.sha256}});
  }
  json records = json::array();
  for (const auto& r : runs) {
    records.push_back({{"scenario", r.record.scenario},
                       {"category", std::string(scenario::to_string(r.record.category))},
                       {"seed", r.record.seed},
                       {"status", std::string(to_string(r.record.status))},
                       {"reason", r.record.reason},
                       {"report", r.record.report_path},
                       {"log", r.record.log_path},
                       {"log_sha256", sha256_hex(r.session_log)},
                       {"warnings", r.warnings}});
  }
  return canonicalize(json{
      {"suite", suite.name},
      {"control", suite.control},
      {"measures", suite.measures},
      {"assessment", {{"seeds", suite.seeds}}},
      {"cap", options.cap},
      {"environment",
       {{"harness_version", kHarnessVersion},
        {"protocol_version", kProtocolVersion},
        {"compiler", __VERSION__},
        {"timing", options.timing}}},
      {"model", {{"file", file_name(suite.model_path)}, {"sha256", suite.model_hash}}},
      {"orders", {{"file", file_name(suite.orders_path)}, {"sha256", suite.orders_hash}}},
      {"registry_sha256", sha256_hex(scenario::CategoryRegistry::builtin_document())},
      {"scenarios", scenarios},
      {"runs", records},
  });
}

void emit_artifacts(const std::string& dir, bool force, const BenchmarkSuite& suite,
                    const RunOptions& options, const std::vector<RunOutput>& runs,
                    const std::optional<ComparisonTable>& table) {
  const fs::path root(dir);
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_empty(root, ec) && !force) {
    throw ArtifactError("output directory " + dir + " is not empty (use --force)");
  }
  fs::create_directories(root / "reports", ec);
  if (ec) {
    throw ArtifactError("cannot create " + (root / "reports").string() + ": " + ec.message());
  }
  fs::create_directories(root / "logs", ec);
  if (ec) {
    throw ArtifactError("cannot create " + (root / "logs").string() + ": " + ec.message());
  }
  for (const auto& r : runs) {
    write_text(root / r.record.report_path, kpi::report_document(r.report));
    write_text(root / r.record.log_path, r.session_log);
  }
  write_text(root / "manifest.json", make_manifest(suite, options, runs).dump(2) + "\n");
  if (table) {
    write_text(root / "comparison.csv", comparison_csv(*table));
  } else {
    fs::remove(root / "comparison.csv", ec);
  }
  write_text(root / "summary.txt", summary_text(suite, runs, table));
}

std::vector<RunSummary> load_run_summaries(const std::string& dir,
                                           std::vector<std::string>* measures) {
  const fs::path root(dir);
  json manifest;
  try {
    manifest = parse_document(read_file((root / "manifest.json").string()), "manifest");
  } catch (const std::exception& e) {
    throw ArtifactError(std::string("cannot read manifest: ") + e.what());
  }
  if (measures) {
    *measures = manifest.at("measures").get<std::vector<std::string>>();
  }
  std::vector<RunSummary> out;
  for (const auto& r : manifest.at("runs")) {
    RunSummary s;
    s.scenario = r.at("scenario").get<std::string>();
    s.category = scenario::parse_category(r.at("category").get<std::string>())
                     .value_or(scenario::Category::None);
    s.seed = r.at("seed").get<std::uint64_t>();
    const std::string status = r.at("status").get<std::string>();
    s.status = status == "ok" ? RunStatus::Ok
               : status == "aborted" ? RunStatus::Aborted
                                     : RunStatus::Invalid;
    try {
      s.report = kpi::report_from_json(parse_document(
          read_file((root / r.at("report").get<std::string>()).string()), "report"));
    } catch (const std::exception& e) {
      throw ArtifactError("cannot read report for " + run_id(s.scenario, s.seed) + ": " +
                          e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RunSummary> summaries(const std::vector<RunOutput>& runs) {
  std::vector<RunSummary> out;
  for (const auto& r : runs) {
    out.push_back(RunSummary{r.record.scenario, r.record.category, r.record.seed,
                             r.record.status, r.report});
  }
  return out;
}

} // namespace hmsbench::harness

#include "support/fixtures.hpp"

#include "hmsbench/common/hash.hpp"
#include "hmsbench/harness/artifacts.hpp"
#include "hmsbench/harness/compare.hpp"
#include "hmsbench/harness/suite.hpp"
#include "hmsbench/scenario/registry.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace hmsbench;
using namespace hmsbench::harness;
namespace fs = std::filesystem;

namespace {

json suite_doc() { return json::parse(fixtures::read("minicell/suite.json")); }

BenchmarkSuite parse(const json& doc) {
  return parse_suite(doc.dump(), fixtures::data_path("minicell"));
}

std::string parse_error(const json& doc) {
  try {
    parse(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

BenchmarkSuite small_suite() {
  auto doc = suite_doc();
  doc["scenarios"] = {"scenarios/null.json", "scenarios/ps9.json"};
  doc["assessment"]["seeds"] = {1, 2};
  return parse(doc);
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST_CASE("suite loading") {
  const auto suite = load_suite(fixtures::data_path("minicell/suite.json"));
  CHECK(suite.name == "minicell");
  CHECK(suite.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(suite.scenarios.size() == 5);
  CHECK(suite.model_hash == fixtures::minicell_hash());
  CHECK(suite.cap == 1'000'000);
  CHECK(suite.measures == kKnownMeasures);
}

TEST_CASE("suite validation") {
  SUBCASE("duplicate seed") {
    auto doc = suite_doc();
    doc["assessment"]["seeds"] = {7, 7};
    CHECK(parse_error(doc).find("duplicate seed 7") != std::string::npos);
  }
  SUBCASE("no scenarios") {
    auto doc = suite_doc();
    doc["scenarios"] = json::array();
    CHECK_FALSE(parse_error(doc).empty());
  }
  SUBCASE("duplicate scenario") {
    auto doc = suite_doc();
    doc["scenarios"].push_back("scenarios/ps9.json");
    CHECK(parse_error(doc).find("duplicate scenario id PS9") != std::string::npos);
  }
  SUBCASE("unknown measure") {
    auto doc = suite_doc();
    doc["measures"].push_back("happiness");
    CHECK(parse_error(doc).find("unknown measure") != std::string::npos);
  }
  SUBCASE("unknown control") {
    auto doc = suite_doc();
    doc["control"] = "oracle";
    CHECK(parse_error(doc).find("unknown control") != std::string::npos);
  }
  SUBCASE("scenario demanding another model") {
    const auto dir = fixtures::temp_dir("second-model");
    auto model = json::parse(fixtures::read("minicell/model.json"));
    model["machines"][0]["operations"]["A"] = 11;
    write(dir + "/model2.json", model.dump(2));
    auto doc = suite_doc();
    doc["scenarios"][1] = {{"path", "scenarios/ps9.json"}, {"model", dir + "/model2.json"}};
    const auto msg = parse_error(doc);
    CHECK(msg.find("model mismatch") != std::string::npos);
    CHECK(msg.find(fixtures::minicell_hash()) != std::string::npos);
    // The same document under another name is still the same model.
    fs::copy_file(fixtures::data_path("minicell/model.json"), dir + "/copy.json");
    doc["scenarios"][1] = {{"path", "scenarios/ps9.json"}, {"model", dir + "/copy.json"}};
    CHECK(parse_error(doc).empty());
  }
}

TEST_CASE("run_suite cardinality, order and determinism") {
  const auto suite = small_suite();
  const auto runs = run_suite(suite, {}, 1);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].record.scenario == "null");
  CHECK(runs[0].record.seed == 1);
  CHECK(runs[1].record.seed == 2);
  CHECK(runs[2].record.scenario == "PS9");
  for (const auto& r : runs) {
    CHECK(r.record.status == RunStatus::Ok);
    CHECK(r.record.suite == "minicell");
    CHECK(r.record.log_path == "logs/" + run_id(r.record.scenario, r.record.seed) + ".il1");
    CHECK(r.record.report_path == "reports/" + run_id(r.record.scenario, r.record.seed) + ".json");
  }
  const auto parallel = run_suite(suite, {}, 4);
  REQUIRE(parallel.size() == runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CHECK(parallel[i].session_log == runs[i].session_log);
    CHECK(kpi::report_document(parallel[i].report) == kpi::report_document(runs[i].report));
  }
}

TEST_CASE("tick cap aborts and keeps the partial log") {
  RunOptions options;
  options.cap = 40;
  const auto out = fixtures::run("null", 1, options);
  CHECK(out.record.status == RunStatus::Aborted);
  CHECK(out.record.reason.find("cap") != std::string::npos);
  CHECK_FALSE(out.session_log.empty());
}

TEST_CASE("a protocol violation marks the run invalid") {
  RunOptions options;
  options.deployment = ControlDeployment::Process;
  // A control that closes its end immediately.
  options.control_command = {"/bin/true"};
  options.timeout = std::chrono::milliseconds(500);
  const auto out = fixtures::run("null", 1, options);
  CHECK(out.record.status == RunStatus::Invalid);
  CHECK_FALSE(out.record.reason.empty());
}

TEST_CASE("compare") {
  const auto runs = run_suite(small_suite(), {}, 2);
  const auto table = compare(summaries(runs), kKnownMeasures);
  CHECK(table.baseline == "null");
  SUBCASE("PS9 against the nominal run delays the makespan") {
    bool seen = false;
    for (const auto& row : table.rows) {
      if (row.scenario == "PS9") {
        seen = true;
        const auto [value, delta] = row.cells.at("makespan");
        CHECK(value == 135);
        CHECK(delta == 45);
      }
    }
    CHECK(seen);
    const auto& stats = table.per_scenario.at("PS9").at("makespan");
    CHECK(stats.mean == 45);
    CHECK(stats.min == 45);
    CHECK(stats.max == 45);
  }
  SUBCASE("single scenario has no baseline") {
    std::vector<RunSummary> only_ps9;
    for (const auto& s : summaries(runs)) {
      if (s.scenario == "PS9") {
        only_ps9.push_back(s);
      }
    }
    CHECK_THROWS_WITH_AS(compare(only_ps9, kKnownMeasures), "no baseline", CompareError);
  }
  SUBCASE("fewer than two ok runs") {
    auto s = summaries(runs);
    s.resize(1);
    CHECK_THROWS_AS(compare(s, kKnownMeasures), CompareError);
  }
  SUBCASE("identical runs give zero deltas") {
    auto s = summaries(runs);
    std::vector<RunSummary> twins;
    for (const auto& r : s) {
      if (r.scenario == "null") {
        twins.push_back(r);
        auto copy = r;
        copy.scenario = "null-again";
        copy.category = scenario::Category::Quality;
        twins.push_back(copy);
      }
    }
    const auto t = compare(twins, kKnownMeasures);
    for (const auto& row : t.rows) {
      for (const auto& [col, cell] : row.cells) {
        CAPTURE(col);
        CHECK(cell.second == 0.0);
      }
    }
  }
  SUBCASE("non-ok runs are excluded") {
    auto s = summaries(runs);
    s.back().status = RunStatus::Aborted;
    const auto t = compare(s, kKnownMeasures);
    CHECK(t.excluded.size() == 1);
    CHECK(t.rows.size() == s.size() - 1);
  }
  SUBCASE("csv has one line per row plus header") {
    const auto csv = comparison_csv(table);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == table.rows.size() + 1);
    CHECK(comparison_summary(table).find("PS9") != std::string::npos);
  }
}

TEST_CASE("emit_artifacts") {
  const auto suite = small_suite();
  const auto runs = run_suite(suite, {}, 1);
  const auto table = compare(summaries(runs), suite.measures);
  const auto dir = fixtures::temp_dir("artifacts");
  emit_artifacts(dir, false, suite, {}, runs, table);
  const auto files = fixtures::tree_hashes(dir);
  std::size_t reports = 0;
  std::size_t logs = 0;
  for (const auto& [path, _] : files) {
    reports += path.rfind("reports/", 0) == 0;
    logs += path.rfind("logs/", 0) == 0;
  }
  CHECK(reports == 4);
  CHECK(logs == 4);
  CHECK(files.count("manifest.json") == 1);
  CHECK(files.count("comparison.csv") == 1);
  CHECK(files.count("summary.txt") == 1);
  CHECK(files.size() == 11);

  const auto manifest = json::parse(read_file(dir + "/manifest.json"));
  CHECK(manifest.at("model").at("sha256") == fixtures::minicell_hash());
  CHECK(manifest.at("runs").size() == 4);
  CHECK(manifest.at("environment").at("harness_version") == kHarnessVersion);
  CHECK(manifest.at("registry_sha256") ==
        sha256_hex(scenario::CategoryRegistry::builtin_document()));

  SUBCASE("non-empty directory is refused without force") {
    CHECK_THROWS_AS(emit_artifacts(dir, false, suite, {}, runs, table), ArtifactError);
  }
  SUBCASE("rerun with force gives identical files") {
    const auto again = run_suite(suite, {}, 3);
    emit_artifacts(dir, true, suite, {}, again, compare(summaries(again), suite.measures));
    CHECK(fixtures::tree_hashes(dir) == files);
  }
  SUBCASE("summaries load back") {
    std::vector<std::string> measures;
    const auto loaded = load_run_summaries(dir, &measures);
    CHECK(measures == suite.measures);
    REQUIRE(loaded.size() == 4);
    const auto t = compare(loaded, measures);
    CHECK(comparison_csv(t) == comparison_csv(table));
  }
  SUBCASE("unwritable location") {
    const auto blocker = fixtures::temp_dir("blocker") + "/file";
    write(blocker, "x");
    CHECK_THROWS_AS(emit_artifacts(blocker + "/out", false, suite, {}, runs, table), ArtifactError);
  }
}

#ifdef HMSBENCH_CLI_PATH
TEST_CASE("command line exit codes") {
  const std::string suite = fixtures::data_path("minicell/suite.json");
  const auto out = fixtures::temp_dir("cli-run") + "/out";
  std::string text;

  CHECK(fixtures::cli("run " + suite + " --seeds 1 --out " + out, &text) == 0);
  CHECK(text.find("PS9_s1: ok, makespan 135") != std::string::npos);
  CHECK(fs::exists(out + "/manifest.json"));

  SUBCASE("refuses a non-empty output directory") {
    CHECK(fixtures::cli("run " + suite + " --seeds 1 --out " + out, &text) == 1);
    CHECK(text.find("not empty") != std::string::npos);
    CHECK(fixtures::cli("run " + suite + " --seeds 1 --force --out " + out) == 0);
  }
  SUBCASE("compare") {
    CHECK(fixtures::cli("compare " + out, &text) == 0);
    CHECK(text.find("PS9") != std::string::npos);
    CHECK(fixtures::cli("compare " + fixtures::temp_dir("empty")) == 1);
  }
  SUBCASE("validate") {
    CHECK(fixtures::cli("validate " + fixtures::data_path("minicell/model.json")) == 0);
    CHECK(fixtures::cli("validate " + fixtures::data_path("minicell/scenarios/ps9.json"), &text) == 0);
    CHECK(text.find("dynamic-reconfiguration") != std::string::npos);
    CHECK(fixtures::cli("validate " + suite) == 0);
    const auto bad = fixtures::temp_dir("bad") + "/model.json";
    std::string doc = fixtures::read("minicell/model.json");
    doc.replace(doc.find("\"id\": \"M2\""), 10, "\"id\": \"M1\"");
    write(bad, doc);
    CHECK(fixtures::cli("validate " + bad, &text) == 1);
    CHECK(text.find("duplicate machine id M1") != std::string::npos);
    CHECK(fixtures::cli("validate /nonexistent.json") == 1);
  }
  SUBCASE("bad arguments") {
    CHECK(fixtures::cli("run") == 1);
    CHECK(fixtures::cli("frobnicate") == 1);
    CHECK(fixtures::cli("run " + suite + " --seeds 4,4 --out " + out + "-dup") == 1);
  }
  SUBCASE("run failure") {
    CHECK(fixtures::cli("run " + suite + " --seeds 1 --cap 30 --out " + out + "-cap") == 2);
    const auto blocker = fixtures::temp_dir("cli-blocker") + "/file";
    write(blocker, "x");
    CHECK(fixtures::cli("run " + suite + " --seeds 1 --out " + blocker + "/out") == 2);
  }
}
#endif

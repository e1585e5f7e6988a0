#include "hmsbench/harness/suite.hpp"

#include "hmsbench/common/hash.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

namespace hmsbench::harness {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() || base_dir.empty() ? p.string() : (fs::path(base_dir) / p).string();
}

std::string read_input(const std::string& path, const std::string& field) {
  try {
    return read_file(path);
  } catch (const std::exception& e) {
    throw ValidationError(field, e.what());
  }
}

} // namespace

BenchmarkSuite load_suite(const std::string& path) {
  const std::string text = read_input(path, "suite");
  return parse_suite(text, fs::path(path).parent_path().string());
}

BenchmarkSuite parse_suite(std::string_view document, const std::string& base_dir) {
  const json doc = parse_document(document, "suite");
  if (!doc.is_object()) {
    throw ValidationError("", "suite document must be a JSON object");
  }
  reject_unknown_keys(doc,
                      {"name", "control", "measures", "assessment", "model", "orders", "scenarios",
                       "cap"},
                      "");
  BenchmarkSuite suite;
  suite.name = require_string(doc, "name", "");

  if (doc.contains("control")) {
    suite.control = require_string(doc, "control", "");
  }
  if (suite.control == "reference") {
    suite.deployment = ControlDeployment::InProcess;
  } else if (suite.control == "reference-process") {
    suite.deployment = ControlDeployment::Process;
  } else {
    throw ValidationError("control", "unknown control approach " + suite.control);
  }

  if (doc.contains("measures")) {
    const json& measures = doc.at("measures");
    if (!measures.is_array()) {
      throw ValidationError("measures", "expected a list");
    }
    for (const auto& m : measures) {
      if (!m.is_string() || std::find(kKnownMeasures.begin(), kKnownMeasures.end(),
                                      m.get<std::string>()) == kKnownMeasures.end()) {
        throw ValidationError("measures", "unknown measure " + m.dump());
      }
      suite.measures.push_back(m.get<std::string>());
    }
  } else {
    suite.measures = kKnownMeasures;
  }

  const json& assessment = require(doc, "assessment", "");
  reject_unknown_keys(assessment, {"seeds"}, "assessment");
  const json& seeds = require(assessment, "seeds", "assessment");
  if (!seeds.is_array() || seeds.empty()) {
    throw ValidationError("assessment.seeds", "expected a non-empty list");
  }
  std::set<std::uint64_t> seen;
  for (const auto& s : seeds) {
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ValidationError("assessment.seeds", "seeds must be non-negative integers");
    }
    const auto seed = s.get<std::uint64_t>();
    if (!seen.insert(seed).second) {
      throw ValidationError("assessment.seeds", "duplicate seed " + std::to_string(seed));
    }
    suite.seeds.push_back(seed);
  }

  if (doc.contains("cap")) {
    suite.cap = require_int(doc, "cap", "");
    if (suite.cap <= 0) {
      throw ValidationError("cap", "tick cap must be positive");
    }
  }

  suite.model_path = resolve(base_dir, require_string(doc, "model", ""));
  suite.model_document = read_input(suite.model_path, "model");
  suite.model_hash = sha256_hex(suite.model_document);
  try {
    suite.model = emulation::load_model(suite.model_document);
  } catch (const ValidationError& e) {
    throw ValidationError("model", e.what());
  }

  suite.orders_path = resolve(base_dir, require_string(doc, "orders", ""));
  suite.orders_document = read_input(suite.orders_path, "orders");
  suite.orders_hash = sha256_hex(suite.orders_document);
  try {
    suite.orders = control::load_order_book(suite.orders_document);
  } catch (const ValidationError& e) {
    throw ValidationError("orders", e.what());
  }
  for (std::size_t i = 0; i < suite.orders.size(); ++i) {
    for (const auto& op : suite.orders[i].routing) {
      if (!suite.model.has_machine_capable(op)) {
        throw ValidationError("orders[" + std::to_string(i) + "].routing",
                              "no capable machine for operation " + op);
      }
    }
  }

  const json& scenarios = require(doc, "scenarios", "");
  if (!scenarios.is_array() || scenarios.empty()) {
    throw ValidationError("scenarios", "at least one scenario is required");
  }
  const auto context = scenario::ScenarioContext::from(suite.model, suite.orders);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string field = "scenarios[" + std::to_string(i) + "]";
    const json& entry = scenarios[i];
    std::string rel;
    if (entry.is_string()) {
      rel = entry.get<std::string>();
    } else if (entry.is_object()) {
      reject_unknown_keys(entry, {"path", "model"}, field);
      rel = require_string(entry, "path", field);
      if (entry.contains("model")) {
        const std::string other = resolve(base_dir, require_string(entry, "model", field));
        const std::string other_hash = sha256_hex(read_input(other, field + ".model"));
        if (other_hash != suite.model_hash) {
          throw ValidationError(field + ".model",
                                "model mismatch: suite model " + suite.model_hash +
                                    ", scenario model " + other_hash);
        }
      }
    } else {
      throw ValidationError(field, "expected a path or an object");
    }
    SuiteScenario sc;
    sc.path = resolve(base_dir, rel);
    sc.document = read_input(sc.path, field);
    sc.sha256 = sha256_hex(sc.document);
    try {
      sc.scenario = scenario::load_scenario(sc.document, context);
    } catch (const ValidationError& e) {
      throw ValidationError(field, e.what());
    }
    if (!ids.insert(sc.scenario.id).second) {
      throw ValidationError(field, "duplicate scenario id " + sc.scenario.id);
    }
    suite.scenarios.push_back(std::move(sc));
  }
  return suite;
}

} // namespace hmsbench::harness

#include "hmsbench/scenario/registry.hpp"

#include <stdexcept>

namespace hmsbench::scenario {

namespace {

// Labels per disturbance category. PS5 sits with the breakdown labels.
constexpr std::string_view kBuiltin = R"({
  "dynamic-reconfiguration": ["Example 1", "Example 2", "PD1", "PD2", "PS10", "PS12", "PS2",
    "PS3", "PS5", "PS7", "PS9", "Query 10", "Query 2", "Query 4", "Query 5", "Query 6", "Query 9"],
  "order-management": ["BD1", "BD2", "PS1", "PS13", "PS14", "PS15", "PS4", "Query 3", "Query 7",
    "Query 8"],
  "quality": ["PS11", "PS6"],
  "supply": ["PS8"]
})";

std::string normalize(std::string_view label) {
  if (!label.empty() && label.front() == '#') {
    label.remove_prefix(1);
  }
  return std::string(label);
}

} // namespace

CategoryRegistry CategoryRegistry::from_json(std::string_view document) {
  const json doc = parse_document(document, "registry");
  if (!doc.is_object()) {
    throw ValidationError("", "registry must be a JSON object");
  }
  CategoryRegistry reg;
  for (const auto& [name, labels] : doc.items()) {
    const auto category = parse_category(name);
    if (!category || *category == Category::None) {
      throw ValidationError(name, "unknown category " + name);
    }
    if (!labels.is_array()) {
      throw ValidationError(name, "expected a list of labels");
    }
    for (const auto& label : labels) {
      if (!label.is_string()) {
        throw ValidationError(name, "labels must be strings");
      }
      const std::string key = normalize(label.get<std::string>());
      if (!reg.labels_.emplace(key, *category).second) {
        throw ValidationError(name, "label " + key + " listed twice");
      }
    }
  }
  return reg;
}

const CategoryRegistry& CategoryRegistry::builtin() {
  static const CategoryRegistry reg = from_json(kBuiltin);
  return reg;
}

std::string CategoryRegistry::builtin_document() {
  return parse_document(kBuiltin, "registry").dump(2) + "\n";
}

Category CategoryRegistry::classify(std::string_view label) const {
  auto it = labels_.find(normalize(label));
  if (it == labels_.end()) {
    throw std::out_of_range("unknown scenario label " + std::string(label));
  }
  return it->second;
}

} // namespace hmsbench::scenario

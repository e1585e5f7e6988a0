#pragma once

#include "hmsbench/scenario/scenario.hpp"

#include <map>
#include <string>
#include <string_view>

namespace hmsbench::scenario {

/// Published scenario labels and their disturbance category.
class CategoryRegistry {
public:
  /// The built-in registry.
  static const CategoryRegistry& builtin();
  static CategoryRegistry from_json(std::string_view document);

  /// Accepts "PS6" and "#PS6" alike. Throws std::out_of_range with
  /// "unknown scenario label" for anything else.
  Category classify(std::string_view label) const;

  const std::map<std::string, Category>& labels() const { return labels_; }
  /// Canonical JSON text of the built-in registry, as shipped in data/.
  static std::string builtin_document();

private:
  std::map<std::string, Category> labels_;
};

} // namespace hmsbench::scenario

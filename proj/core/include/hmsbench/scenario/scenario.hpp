#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"
#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/kernel.hpp"
#include "hmsbench/emulation/shop_model.hpp"
#include "hmsbench/emulation/sim_event.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::scenario {

enum class Category : std::uint8_t { None, DynamicReconfiguration, Quality, OrderManagement, Supply };

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

enum class DistributionKind : std::uint8_t { Constant, UniformInt, ExponentialInt };

struct Distribution {
  std::string name;
  DistributionKind kind = DistributionKind::Constant;
  std::int64_t value = 0;  // constant
  std::int64_t min = 0;    // uniform-int
  std::int64_t max = 0;
  double mean = 0.0;       // exponential-int
  /// Seed stream label; defaults to the distribution name.
  std::string stream;

  bool operator==(const Distribution&) const = default;
};

enum class TriggerKind : std::uint8_t { At, On, After };

struct Trigger {
  TriggerKind kind = TriggerKind::At;
  Tick at = 0;
  emulation::EventKind event = emulation::EventKind::OrderReleased;
  std::map<std::string, std::string> filter;
  std::int64_t occurrence = 1;
  std::shared_ptr<const Trigger> inner;  // after
  Tick delay = 0;

  /// Innermost at/on trigger and the summed delay of every after wrapper.
  const Trigger& base() const;
  Tick total_delay() const;
  bool matches(const emulation::SimEvent& event) const;
};

/// Placeholder targets bound to the triggering event's subjects.
inline constexpr std::string_view kBindOrder = "@order";
inline constexpr std::string_view kBindMachine = "@machine";

enum class ActionKind : std::uint8_t { Inject, Direct };

struct Action {
  ActionKind kind = ActionKind::Inject;
  emulation::Injection injection;
  /// When set, the injection duration is sampled from this distribution.
  std::string duration_from;
  control::ControlDirective directive;
};

struct Rule {
  Trigger trigger;
  std::vector<Action> actions;
  std::int64_t max_occurrences = 1;
};

struct Scenario {
  std::string id;
  Category category = Category::None;
  std::vector<Rule> rules;
  std::map<std::string, Distribution> distributions;
  std::string description;

  bool is_null() const { return rules.empty(); }
};

/// Ids a scenario may reference.
struct ScenarioContext {
  std::set<std::string> machines;
  std::set<std::string> shuttles;
  std::set<std::string> nodes;
  std::set<std::string> orders;
  std::set<std::string> operations;

  static ScenarioContext from(const emulation::ShopModel& model,
                              const std::vector<control::ProductOrder>& orders);
};

/// Parses and validates a scenario document. Throws ValidationError naming
/// unknown event kinds, undeclared distributions and unresolvable targets.
Scenario load_scenario(std::string_view document, const ScenarioContext& context);

/// The rule-free baseline scenario.
Scenario null_scenario();

} // namespace hmsbench::scenario

#pragma once

#include "hmsbench/scenario/random_streams.hpp"
#include "hmsbench/scenario/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hmsbench::scenario {

/// One fired rule with every placeholder bound and every duration sampled.
struct Firing {
  Tick time = 0;
  std::size_t rule = 0;
  std::vector<std::variant<emulation::Injection, control::ControlDirective>> actions;
};

/// Watches the event stream and the clock, firing scenario rules.
class ScenarioManager {
public:
  ScenarioManager(Scenario scenario, std::uint64_t seed);

  /// Evaluates on-event triggers against `event`. Delayed rules are queued
  /// and come out of on_time once due.
  std::vector<Firing> on_event(const emulation::SimEvent& event);

  /// Fires every at-time rule and queued delayed firing due at or before
  /// `now`.
  std::vector<Firing> on_time(Tick now);

  /// Earliest time a timed firing is still pending, if any.
  std::optional<Tick> next_deadline() const;

  std::int64_t sample(const std::string& name) { return streams_.sample(name); }

  const Scenario& scenario() const { return scenario_; }
  /// Actions skipped because a placeholder had nothing to bind to.
  const std::vector<std::string>& warnings() const { return warnings_; }

private:
  struct Delayed {
    Tick time;
    std::uint64_t order;
    std::size_t rule;
    emulation::SimEvent cause;
  };

  Firing fire(std::size_t rule, Tick time, const emulation::SimEvent* cause);

  Scenario scenario_;
  RandomStreams streams_;
  std::vector<std::int64_t> matches_;
  std::vector<std::int64_t> fired_;
  std::vector<Delayed> delayed_;
  std::uint64_t delayed_counter_ = 0;
  std::vector<std::string> warnings_;
};

} // namespace hmsbench::scenario

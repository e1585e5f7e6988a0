#include "hmsbench/scenario/manager.hpp"

#include <algorithm>
#include <tuple>

namespace hmsbench::scenario {

using emulation::SimEvent;

ScenarioManager::ScenarioManager(Scenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), streams_(scenario_, seed),
      matches_(scenario_.rules.size(), 0), fired_(scenario_.rules.size(), 0) {}

Firing ScenarioManager::fire(std::size_t index, Tick time, const SimEvent* cause) {
  const Rule& rule = scenario_.rules[index];
  Firing f;
  f.time = time;
  f.rule = index;
  auto bind = [&](const std::string& target) -> std::optional<std::string> {
    if (target == kBindOrder || target == kBindMachine) {
      const std::string value = cause ? (target == kBindOrder ? cause->order : cause->machine)
                                      : std::string{};
      if (value.empty()) {
        warnings_.push_back("t=" + std::to_string(time) + " rule " + std::to_string(index) +
                            ": nothing bound to " + target + ", action skipped");
        return std::nullopt;
      }
      return value;
    }
    return target;
  };
  for (const Action& a : rule.actions) {
    if (a.kind == ActionKind::Inject) {
      emulation::Injection inj = a.injection;
      auto target = bind(inj.target);
      if (!target) {
        continue;
      }
      inj.target = *target;
      if (!a.duration_from.empty()) {
        inj.duration = streams_.sample(a.duration_from);
      }
      f.actions.emplace_back(std::move(inj));
    } else {
      control::ControlDirective d = a.directive;
      std::string& slot = d.kind == control::DirectiveKind::AnnounceBreakdown ||
                                  d.kind == control::DirectiveKind::AnnounceSupplyBlock
                              ? d.machine
                              : d.order_id;
      if (d.kind != control::DirectiveKind::InsertOrder) {
        auto target = bind(slot);
        if (!target) {
          continue;
        }
        slot = *target;
      }
      f.actions.emplace_back(std::move(d));
    }
  }
  return f;
}

std::vector<Firing> ScenarioManager::on_event(const SimEvent& event) {
  std::vector<Firing> out;
  for (std::size_t i = 0; i < scenario_.rules.size(); ++i) {
    const Rule& rule = scenario_.rules[i];
    const Trigger& base = rule.trigger.base();
    if (!base.matches(event)) {
      continue;
    }
    ++matches_[i];
    if (matches_[i] < base.occurrence || fired_[i] >= rule.max_occurrences) {
      continue;
    }
    ++fired_[i];
    const Tick delay = rule.trigger.total_delay();
    if (delay == 0) {
      out.push_back(fire(i, event.time, &event));
    } else {
      delayed_.push_back(Delayed{event.time + delay, delayed_counter_++, i, event});
    }
  }
  return out;
}

std::vector<Firing> ScenarioManager::on_time(Tick now) {
  // (time, at-rules before delayed firings, rule or queue order)
  std::vector<std::tuple<Tick, int, std::uint64_t>> due;
  for (std::size_t i = 0; i < scenario_.rules.size(); ++i) {
    const Rule& rule = scenario_.rules[i];
    if (rule.trigger.base().kind != TriggerKind::At || fired_[i] > 0) {
      continue;
    }
    const Tick t = rule.trigger.base().at + rule.trigger.total_delay();
    if (t <= now) {
      due.emplace_back(t, 0, i);
    }
  }
  for (const auto& d : delayed_) {
    if (d.time <= now) {
      due.emplace_back(d.time, 1, d.order);
    }
  }
  std::sort(due.begin(), due.end());

  std::vector<Firing> out;
  for (const auto& [time, source, key] : due) {
    if (source == 0) {
      ++fired_[key];
      out.push_back(fire(key, time, nullptr));
      continue;
    }
    auto it = std::find_if(delayed_.begin(), delayed_.end(),
                           [&](const Delayed& d) { return d.order == key; });
    const Delayed d = *it;
    delayed_.erase(it);
    out.push_back(fire(d.rule, d.time, &d.cause));
  }
  return out;
}

std::optional<Tick> ScenarioManager::next_deadline() const {
  std::optional<Tick> best;
  auto consider = [&](Tick t) {
    if (!best || t < *best) {
      best = t;
    }
  };
  for (std::size_t i = 0; i < scenario_.rules.size(); ++i) {
    const Rule& rule = scenario_.rules[i];
    if (rule.trigger.base().kind == TriggerKind::At && fired_[i] == 0) {
      consider(rule.trigger.base().at + rule.trigger.total_delay());
    }
  }
  for (const auto& d : delayed_) {
    consider(d.time);
  }
  return best;
}

} // namespace hmsbench::scenario

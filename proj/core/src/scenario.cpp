#include "hmsbench/scenario/scenario.hpp"

#include <array>

namespace hmsbench::scenario {

using emulation::EventKind;
using emulation::InjectionKind;

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames{
    "none", "dynamic-reconfiguration", "quality", "order-management", "supply"};

constexpr int kMaxAfterDepth = 2;

void check_id(const std::set<std::string>& known, const std::string& id, std::string_view what,
              const std::string& path) {
  if (!known.count(id)) {
    throw ValidationError(path, "unknown " + std::string(what) + " " + id);
  }
}

Distribution parse_distribution(const std::string& name, const json& doc, const std::string& path) {
  if (!doc.is_object()) {
    throw ValidationError(path, "expected an object");
  }
  Distribution d;
  d.name = name;
  d.stream = name;
  const std::string kind = require_string(doc, "kind", path);
  if (kind == "constant") {
    reject_unknown_keys(doc, {"kind", "value", "stream"}, path);
    d.kind = DistributionKind::Constant;
    d.value = require_int(doc, "value", path);
    if (d.value <= 0) {
      throw ValidationError(path + ".value", "non-positive duration " + std::to_string(d.value));
    }
  } else if (kind == "uniform-int") {
    reject_unknown_keys(doc, {"kind", "min", "max", "stream"}, path);
    d.kind = DistributionKind::UniformInt;
    d.min = require_int(doc, "min", path);
    d.max = require_int(doc, "max", path);
    if (d.min <= 0) {
      throw ValidationError(path + ".min", "non-positive duration " + std::to_string(d.min));
    }
    if (d.max < d.min) {
      throw ValidationError(path + ".max", "max below min");
    }
  } else if (kind == "exponential-int") {
    reject_unknown_keys(doc, {"kind", "mean", "stream"}, path);
    d.kind = DistributionKind::ExponentialInt;
    const json& mean = require(doc, "mean", path);
    if (!mean.is_number() || mean.get<double>() <= 0.0) {
      throw ValidationError(path + ".mean", "mean must be a positive number");
    }
    d.mean = mean.get<double>();
  } else {
    throw ValidationError(path + ".kind", "unknown distribution kind " + kind);
  }
  if (doc.contains("stream")) {
    d.stream = require_string(doc, "stream", path);
  }
  return d;
}

Trigger parse_trigger(const json& doc, const ScenarioContext& ctx, const std::string& path,
                      int depth) {
  if (!doc.is_object() || doc.size() != 1) {
    throw ValidationError(path, "trigger needs exactly one of at, on, after");
  }
  Trigger t;
  if (doc.contains("at")) {
    t.kind = TriggerKind::At;
    t.at = require_int(doc, "at", path);
    if (t.at < 0) {
      throw ValidationError(path + ".at", "negative time");
    }
  } else if (doc.contains("on")) {
    const std::string p = path + ".on";
    const json& on = doc.at("on");
    if (!on.is_object()) {
      throw ValidationError(p, "expected an object");
    }
    reject_unknown_keys(on, {"event", "filter", "occurrence"}, p);
    t.kind = TriggerKind::On;
    const std::string name = require_string(on, "event", p);
    const auto kind = emulation::parse_event_kind(name);
    if (!kind) {
      throw ValidationError(p + ".event", "unknown event kind " + name);
    }
    t.event = *kind;
    if (on.contains("occurrence")) {
      t.occurrence = require_int(on, "occurrence", p);
      if (t.occurrence < 1) {
        throw ValidationError(p + ".occurrence", "occurrence index must be at least 1");
      }
    }
    if (on.contains("filter")) {
      const json& filter = on.at("filter");
      if (!filter.is_object()) {
        throw ValidationError(p + ".filter", "expected an object");
      }
      for (const auto& [field, value] : filter.items()) {
        const std::string fp = p + ".filter." + field;
        if (!value.is_string()) {
          throw ValidationError(fp, "expected a string");
        }
        const std::string id = value.get<std::string>();
        if (field == "machine") {
          check_id(ctx.machines, id, "machine", fp);
        } else if (field == "shuttle") {
          check_id(ctx.shuttles, id, "shuttle", fp);
        } else if (field == "node") {
          check_id(ctx.nodes, id, "node", fp);
        } else if (field == "order") {
          check_id(ctx.orders, id, "order", fp);
        } else if (field != "detail") {
          throw ValidationError(fp, "unknown subject field " + field);
        }
        t.filter.emplace(field, id);
      }
    }
  } else if (doc.contains("after")) {
    const std::string p = path + ".after";
    if (depth >= kMaxAfterDepth) {
      throw ValidationError(p, "after-nesting depth exceeds " + std::to_string(kMaxAfterDepth));
    }
    const json& after = doc.at("after");
    if (!after.is_object()) {
      throw ValidationError(p, "expected an object");
    }
    require_keys_exactly(after, {"delay", "trigger"}, p);
    t.kind = TriggerKind::After;
    t.delay = require_int(after, "delay", p);
    if (t.delay < 0) {
      throw ValidationError(p + ".delay", "negative delay");
    }
    t.inner = std::make_shared<const Trigger>(
        parse_trigger(after.at("trigger"), ctx, p + ".trigger", depth + 1));
  } else {
    throw ValidationError(path, "trigger needs exactly one of at, on, after");
  }
  return t;
}

// Resolves a target that may be a placeholder bound at firing time.
void check_target(const std::string& id, std::string_view placeholder,
                  const std::set<std::string>& known, std::string_view what, bool event_bound,
                  const std::string& path) {
  if (id == placeholder) {
    if (!event_bound) {
      throw ValidationError(path, std::string(placeholder) + " needs an on-event trigger");
    }
    return;
  }
  check_id(known, id, what, path);
}

Action parse_action(const json& doc, const Scenario& sc, ScenarioContext& ctx, bool event_bound,
                    const std::string& path) {
  if (!doc.is_object() || doc.size() != 1 || !(doc.contains("inject") || doc.contains("direct"))) {
    throw ValidationError(path, "action needs exactly one of inject, direct");
  }
  Action a;
  if (doc.contains("inject")) {
    const std::string p = path + ".inject";
    const json& inj = doc.at("inject");
    if (!inj.is_object()) {
      throw ValidationError(p, "expected an object");
    }
    reject_unknown_keys(inj, {"kind", "target", "duration", "policy"}, p);
    a.kind = ActionKind::Inject;
    const std::string kind = require_string(inj, "kind", p);
    const auto ik = emulation::parse_injection_kind(kind);
    if (!ik) {
      throw ValidationError(p + ".kind", "unknown injection kind " + kind);
    }
    a.injection.kind = *ik;
    a.injection.target = require_string(inj, "target", p);
    if (*ik == InjectionKind::ProductReject) {
      check_target(a.injection.target, kBindOrder, ctx.orders, "order", event_bound, p + ".target");
      if (inj.contains("policy")) {
        const std::string policy = require_string(inj, "policy", p);
        const auto rp = emulation::parse_reject_policy(policy);
        if (!rp) {
          throw ValidationError(p + ".policy", "unknown reject policy " + policy);
        }
        a.injection.policy = *rp;
      }
    } else {
      check_target(a.injection.target, kBindMachine, ctx.machines, "machine", event_bound,
                   p + ".target");
      if (inj.contains("policy")) {
        throw ValidationError(p + ".policy", "policy applies to product-reject only");
      }
    }
    if (inj.contains("duration")) {
      const json& dur = inj.at("duration");
      if (dur.is_string()) {
        a.duration_from = dur.get<std::string>();
        if (!sc.distributions.count(a.duration_from)) {
          throw ValidationError(p + ".duration", "undeclared distribution " + a.duration_from);
        }
      } else {
        const std::int64_t d = require_int(inj, "duration", p);
        if (d <= 0) {
          throw ValidationError(p + ".duration", "non-positive duration " + std::to_string(d));
        }
        a.injection.duration = d;
      }
    }
    return a;
  }

  const std::string p = path + ".direct";
  const json& dir = doc.at("direct");
  if (!dir.is_object()) {
    throw ValidationError(p, "expected an object");
  }
  a.kind = ActionKind::Direct;
  const std::string kind = require_string(dir, "kind", p);
  const auto dk = control::parse_directive_kind(kind);
  if (!dk) {
    throw ValidationError(p + ".kind", "unknown directive kind " + kind);
  }
  json body = dir;
  body.erase("kind");
  try {
    a.directive = control::directive_from_body(*dk, body);
  } catch (const ValidationError& e) {
    throw ValidationError(p, e.what());
  }
  switch (*dk) {
  case control::DirectiveKind::InsertOrder: {
    const auto& order = a.directive.order;
    if (ctx.orders.count(order.id)) {
      throw ValidationError(p + ".order.id", "duplicate order id " + order.id);
    }
    for (const auto& op : order.routing) {
      if (!ctx.operations.count(op)) {
        throw ValidationError(p + ".order.routing", "no capable machine for operation " + op);
      }
    }
    ctx.orders.insert(order.id);
    break;
  }
  case control::DirectiveKind::CancelOrder:
  case control::DirectiveKind::SetPriority:
    check_target(a.directive.order_id, kBindOrder, ctx.orders, "order", event_bound, p + ".order");
    break;
  case control::DirectiveKind::AnnounceBreakdown:
  case control::DirectiveKind::AnnounceSupplyBlock:
    check_target(a.directive.machine, kBindMachine, ctx.machines, "machine", event_bound,
                 p + ".machine");
    break;
  }
  return a;
}

} // namespace

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) {
      return static_cast<Category>(i);
    }
  }
  return std::nullopt;
}

const Trigger& Trigger::base() const { return kind == TriggerKind::After ? inner->base() : *this; }

Tick Trigger::total_delay() const {
  return kind == TriggerKind::After ? delay + inner->total_delay() : 0;
}

bool Trigger::matches(const emulation::SimEvent& e) const {
  if (kind != TriggerKind::On || e.kind != event) {
    return false;
  }
  for (const auto& [field, value] : filter) {
    if (e.subject(field) != std::optional<std::string_view>(value)) {
      return false;
    }
  }
  return true;
}

ScenarioContext ScenarioContext::from(const emulation::ShopModel& model,
                                      const std::vector<control::ProductOrder>& orders) {
  ScenarioContext ctx;
  for (const auto& m : model.machines) {
    ctx.machines.insert(m.id);
    for (const auto& [op, _] : m.durations) {
      ctx.operations.insert(op);
    }
  }
  for (const auto& s : model.shuttle_ids()) {
    ctx.shuttles.insert(s);
  }
  ctx.nodes.insert(model.nodes.begin(), model.nodes.end());
  for (const auto& o : orders) {
    ctx.orders.insert(o.id);
  }
  return ctx;
}

Scenario load_scenario(std::string_view document, const ScenarioContext& context) {
  const json doc = parse_document(document, "scenario");
  if (!doc.is_object()) {
    throw ValidationError("", "scenario document must be a JSON object");
  }
  reject_unknown_keys(doc, {"id", "category", "rules", "distributions", "description"}, "");
  Scenario sc;
  sc.id = require_string(doc, "id", "");
  if (sc.id.empty()) {
    throw ValidationError("id", "empty scenario id");
  }
  const std::string category = require_string(doc, "category", "");
  const auto cat = parse_category(category);
  if (!cat) {
    throw ValidationError("category", "unknown category " + category);
  }
  sc.category = *cat;
  if (doc.contains("description")) {
    sc.description = require_string(doc, "description", "");
  }
  if (doc.contains("distributions")) {
    const json& dists = doc.at("distributions");
    if (!dists.is_object()) {
      throw ValidationError("distributions", "expected an object");
    }
    for (const auto& [name, d] : dists.items()) {
      sc.distributions.emplace(name, parse_distribution(name, d, "distributions." + name));
    }
  }
  const json& rules = require(doc, "rules", "");
  if (!rules.is_array()) {
    throw ValidationError("rules", "expected a list");
  }
  ScenarioContext ctx = context;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string path = "rules[" + std::to_string(i) + "]";
    const json& r = rules[i];
    if (!r.is_object()) {
      throw ValidationError(path, "expected an object");
    }
    reject_unknown_keys(r, {"trigger", "actions", "max_occurrences"}, path);
    Rule rule;
    rule.trigger = parse_trigger(require(r, "trigger", path), ctx, path + ".trigger", 0);
    if (r.contains("max_occurrences")) {
      rule.max_occurrences = require_int(r, "max_occurrences", path);
      if (rule.max_occurrences < 1) {
        throw ValidationError(path + ".max_occurrences", "must be at least 1");
      }
    }
    const json& actions = require(r, "actions", path);
    if (!actions.is_array() || actions.empty()) {
      throw ValidationError(path + ".actions", "expected a non-empty list");
    }
    const bool event_bound = rule.trigger.base().kind == TriggerKind::On;
    for (std::size_t j = 0; j < actions.size(); ++j) {
      rule.actions.push_back(parse_action(actions[j], sc, ctx, event_bound,
                                          path + ".actions[" + std::to_string(j) + "]"));
    }
    sc.rules.push_back(std::move(rule));
  }
  if (sc.category == Category::None && !sc.rules.empty()) {
    throw ValidationError("category", "category none is reserved for the rule-free baseline");
  }
  return sc;
}

Scenario null_scenario() {
  Scenario sc;
  sc.id = "null";
  sc.category = Category::None;
  sc.description = "Undisturbed baseline.";
  return sc;
}

} // namespace hmsbench::scenario

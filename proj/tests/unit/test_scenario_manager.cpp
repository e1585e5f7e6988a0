#include "support/fixtures.hpp"

#include "hmsbench/il/message.hpp"
#include "hmsbench/scenario/manager.hpp"
#include "hmsbench/scenario/random_streams.hpp"
#include "hmsbench/scenario/registry.hpp"

#include "hmsbench/common/hash.hpp"

#include <doctest.h>

using namespace hmsbench;
using namespace hmsbench::scenario;
using emulation::EventKind;
using emulation::Injection;
using emulation::InjectionKind;
using emulation::SimEvent;

namespace {

ScenarioContext ctx() { return ScenarioContext::from(fixtures::minicell(), fixtures::minicell_orders()); }

std::string load_error(const json& doc) {
  try {
    load_scenario(doc.dump(), ctx());
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

json ps9_doc() { return json::parse(fixtures::read("minicell/scenarios/ps9.json")); }

SimEvent departed(Tick t, std::uint64_t seq, const std::string& machine, const std::string& shuttle) {
  SimEvent e;
  e.time = t;
  e.seq = seq;
  e.kind = EventKind::ShuttleDeparted;
  e.machine = machine;
  e.node = machine;
  e.shuttle = shuttle;
  return e;
}

Scenario with_distribution(const json& dist, const std::string& id = "golden") {
  json doc = {{"id", id},
              {"category", "supply"},
              {"rules", json::array()},
              {"distributions", {{"d_u", dist}}}};
  return load_scenario(doc.dump(), ctx());
}

std::vector<std::int64_t> draws(ScenarioManager& m, const std::string& name, int n) {
  std::vector<std::int64_t> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(m.sample(name));
  }
  return out;
}

} // namespace

TEST_CASE("PS9 document loads as dynamic reconfiguration") {
  const auto sc = fixtures::scenario("ps9");
  CHECK(sc.id == "PS9");
  CHECK(sc.category == Category::DynamicReconfiguration);
  CHECK(CategoryRegistry::builtin().classify(sc.id) == sc.category);
  REQUIRE(sc.rules.size() == 1);
  const auto& rule = sc.rules[0];
  CHECK(rule.trigger.kind == TriggerKind::On);
  CHECK(rule.trigger.event == EventKind::ShuttleDeparted);
  CHECK(rule.trigger.filter == std::map<std::string, std::string>{{"machine", "M2"}});
  CHECK(rule.trigger.occurrence == 1);
  CHECK(rule.max_occurrences == 1);
  REQUIRE(rule.actions.size() == 2);
  CHECK(rule.actions[0].kind == ActionKind::Inject);
  CHECK(rule.actions[0].injection.kind == InjectionKind::MachineDown);
  CHECK(rule.actions[0].injection.target == "M2");
  CHECK(rule.actions[0].duration_from == "d_repair");
  CHECK(rule.actions[1].kind == ActionKind::Direct);
  CHECK(rule.actions[1].directive.kind == control::DirectiveKind::AnnounceBreakdown);
  CHECK(rule.actions[1].directive.machine == "M2");
}

TEST_CASE("every shipped scenario loads under its category") {
  const std::map<std::string, Category> expected{
      {"null", Category::None},
      {"ps9", Category::DynamicReconfiguration},
      {"rush-order", Category::OrderManagement},
      {"reject-rework", Category::Quality},
      {"supply-shortage", Category::Supply}};
  for (const auto& [file, category] : expected) {
    CAPTURE(file);
    CHECK(fixtures::scenario(file).category == category);
  }
  CHECK(fixtures::scenario("null").is_null());
}

TEST_CASE("scenario validation") {
  SUBCASE("undeclared distribution") {
    auto doc = ps9_doc();
    doc["rules"][0]["actions"][0]["inject"]["duration"] = "d_x";
    CHECK(load_error(doc).find("undeclared distribution d_x") != std::string::npos);
  }
  SUBCASE("unknown event kind") {
    auto doc = ps9_doc();
    doc["rules"][0]["trigger"]["on"]["event"] = "shuttle-teleported";
    CHECK(load_error(doc).find("unknown event kind shuttle-teleported") != std::string::npos);
  }
  SUBCASE("unresolvable targets") {
    auto doc = ps9_doc();
    doc["rules"][0]["trigger"]["on"]["filter"]["machine"] = "M7";
    CHECK(load_error(doc).find("unknown machine M7") != std::string::npos);
    doc = ps9_doc();
    doc["rules"][0]["actions"][1]["direct"]["machine"] = "M3";
    CHECK(load_error(doc).find("M3") != std::string::npos);
  }
  SUBCASE("occurrence below one") {
    auto doc = ps9_doc();
    doc["rules"][0]["trigger"]["on"]["occurrence"] = 0;
    CHECK(load_error(doc).find("occurrence") != std::string::npos);
  }
  SUBCASE("after nesting deeper than two") {
    auto doc = ps9_doc();
    json t = {{"at", 5}};
    for (int i = 0; i < 3; ++i) {
      t = {{"after", {{"delay", 1}, {"trigger", t}}}};
    }
    doc["rules"][0]["trigger"] = t;
    doc["rules"][0]["actions"][0]["inject"]["duration"] = "d_repair";
    CHECK(load_error(doc).find("after-nesting depth exceeds 2") != std::string::npos);
  }
  SUBCASE("placeholder on a timed rule") {
    auto doc = json::parse(fixtures::read("minicell/scenarios/reject-rework.json"));
    doc["rules"][0]["trigger"] = {{"at", 3}};
    CHECK(load_error(doc).find("@order needs an on-event trigger") != std::string::npos);
  }
  SUBCASE("negative delay") {
    auto doc = ps9_doc();
    doc["rules"][0]["trigger"] = {{"after", {{"delay", -1}, {"trigger", {{"at", 0}}}}}};
    CHECK(load_error(doc).find("negative delay") != std::string::npos);
  }
  SUBCASE("empty rules list is a null scenario") {
    json doc = {{"id", "baseline"}, {"category", "none"}, {"rules", json::array()}};
    const auto sc = load_scenario(doc.dump(), ctx());
    CHECK(sc.is_null());
    CHECK(sc.category == Category::None);
  }
  SUBCASE("category none with rules") {
    auto doc = ps9_doc();
    doc["category"] = "none";
    CHECK_FALSE(load_error(doc).empty());
  }
  SUBCASE("unknown top-level key") {
    auto doc = ps9_doc();
    doc["model"] = "other.json";
    CHECK_FALSE(load_error(doc).empty());
  }
}

TEST_CASE("PS9 fires on the first departure from M2 only") {
  ScenarioManager m(fixtures::scenario("ps9"), 1);
  CHECK(m.on_event(departed(20, 4, "M1", "S1")).empty());
  const auto firings = m.on_event(departed(35, 9, "M2", "S1"));
  REQUIRE(firings.size() == 1);
  CHECK(firings[0].time == 35);
  REQUIRE(firings[0].actions.size() == 2);
  const auto& inj = std::get<Injection>(firings[0].actions[0]);
  CHECK(inj.kind == InjectionKind::MachineDown);
  CHECK(inj.target == "M2");
  CHECK(inj.duration == 50);
  const auto& dir = std::get<control::ControlDirective>(firings[0].actions[1]);
  CHECK(dir.kind == control::DirectiveKind::AnnounceBreakdown);
  CHECK(dir.machine == "M2");
  CHECK(m.on_event(departed(80, 20, "M2", "S2")).empty());
  CHECK_FALSE(m.next_deadline());
}

TEST_CASE("occurrence index and max occurrences") {
  auto doc = ps9_doc();
  doc["rules"][0]["trigger"]["on"]["occurrence"] = 2;
  doc["rules"][0]["max_occurrences"] = 2;
  ScenarioManager m(load_scenario(doc.dump(), ctx()), 1);
  CHECK(m.on_event(departed(10, 1, "M2", "S1")).empty());
  CHECK(m.on_event(departed(20, 2, "M2", "S1")).size() == 1);
  CHECK(m.on_event(departed(30, 3, "M2", "S1")).size() == 1);
  CHECK(m.on_event(departed(40, 4, "M2", "S1")).empty());
}

TEST_CASE("at and after triggers") {
  json doc = ps9_doc();
  doc["rules"][0]["trigger"] = json::parse(R"({"after": {"delay": 7, "trigger": {"after": {"delay": 3,
      "trigger": {"on": {"event": "shuttle-departed", "filter": {"machine": "M2"}}}}}}})");
  doc["rules"].push_back(json::parse(R"({"trigger": {"at": 12},
      "actions": [{"direct": {"kind": "set-priority", "order": "O2", "priority": 5}}]})"));
  const auto sc = load_scenario(doc.dump(), ctx());
  CHECK(sc.rules[0].trigger.total_delay() == 10);
  ScenarioManager m(sc, 1);
  CHECK(m.next_deadline() == 12);
  CHECK(m.on_time(11).empty());
  CHECK(m.on_event(departed(11, 5, "M2", "S2")).empty());
  CHECK(m.next_deadline() == 12);
  const auto at12 = m.on_time(12);
  REQUIRE(at12.size() == 1);
  CHECK(at12[0].rule == 1);
  CHECK(m.next_deadline() == 21);
  CHECK(m.on_time(20).empty());
  const auto at21 = m.on_time(21);
  REQUIRE(at21.size() == 1);
  CHECK(at21[0].time == 21);
  CHECK_FALSE(m.next_deadline());
}

TEST_CASE("placeholders bind to the triggering event") {
  const auto sc = fixtures::scenario("reject-rework");
  ScenarioManager m(sc, 1);
  SimEvent finished;
  finished.time = 50;
  finished.kind = EventKind::OpFinished;
  finished.machine = "M2";
  finished.order = "O2";
  const auto f = m.on_event(finished);
  REQUIRE(f.size() == 1);
  const auto& inj = std::get<Injection>(f[0].actions[0]);
  CHECK(inj.kind == InjectionKind::ProductReject);
  CHECK(inj.target == "O2");
  CHECK(inj.policy == emulation::RejectPolicy::Rework);

  ScenarioManager empty(sc, 1);
  finished.order.clear();
  const auto skipped = empty.on_event(finished);
  CHECK(empty.warnings().size() == 1);
  for (const auto& firing : skipped) {
    CHECK(firing.actions.empty());
  }
}

TEST_CASE("sample") {
  SUBCASE("constant") {
    ScenarioManager m(with_distribution({{"kind", "constant"}, {"value", 50}}), 9);
    CHECK(draws(m, "d_u", 5) == std::vector<std::int64_t>(5, 50));
  }
  SUBCASE("degenerate interval") {
    ScenarioManager m(with_distribution({{"kind", "uniform-int"}, {"min", 10}, {"max", 10}}), 9);
    CHECK(draws(m, "d_u", 5) == std::vector<std::int64_t>(5, 10));
  }
  SUBCASE("uniform 10..20 with seed 42 matches the independent oracle") {
    // tests/oracles/random_streams.py 42 golden d_u 10 20 5
    const auto sc = with_distribution({{"kind", "uniform-int"}, {"min", 10}, {"max", 20}});
    ScenarioManager m(sc, 42);
    CHECK(draws(m, "d_u", 2) == std::vector<std::int64_t>{16, 13});
    ScenarioManager again(sc, 42);
    CHECK(draws(again, "d_u", 5) == std::vector<std::int64_t>{16, 13, 16, 12, 16});
  }
  SUBCASE("supply shortage durations per seed match the oracle") {
    const std::map<std::uint64_t, std::int64_t> expected{{1, 33}, {2, 39}, {3, 36}};
    for (const auto& [seed, value] : expected) {
      ScenarioManager m(fixtures::scenario("supply-shortage"), seed);
      CHECK(m.sample("d_supply") == value);
    }
  }
  SUBCASE("exponential is a positive integer") {
    ScenarioManager m(with_distribution({{"kind", "exponential-int"}, {"mean", 4.5}}), 3);
    for (auto v : draws(m, "d_u", 200)) {
      CHECK(v >= 1);
    }
  }
  SUBCASE("unknown name") {
    ScenarioManager m(fixtures::scenario("ps9"), 1);
    CHECK_THROWS_AS(m.sample("d_nope"), std::out_of_range);
  }
}

TEST_CASE("property: streams are independent") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    json base = {{"id", "indep"},
                 {"category", "supply"},
                 {"rules", json::array()},
                 {"distributions",
                  {{"a", {{"kind", "uniform-int"}, {"min", 1}, {"max", 1000}}},
                   {"b", {{"kind", "exponential-int"}, {"mean", 30.0}}}}}};
    json reseeded = base;
    reseeded["distributions"]["a"]["stream"] = "a-" + std::to_string(seed);
    json extended = base;
    extended["distributions"]["c"] = {{"kind", "uniform-int"}, {"min", 1}, {"max", 9}};

    ScenarioManager m1(load_scenario(base.dump(), ctx()), seed);
    ScenarioManager m2(load_scenario(reseeded.dump(), ctx()), seed);
    ScenarioManager m3(load_scenario(extended.dump(), ctx()), seed);
    const auto b1 = draws(m1, "b", 20);
    draws(m2, "a", 7);
    CHECK(draws(m2, "b", 20) == b1);
    draws(m3, "c", 3);
    CHECK(draws(m3, "b", 20) == b1);
  }
}

TEST_CASE("uniform draws stay in range and cover it") {
  auto gen = make_stream(5, "range", "u");
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = uniform_int(gen, -3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(uniform_int(gen, 4, 3), std::invalid_argument);
}

TEST_CASE("trigger-time exactness in full runs") {
  for (const auto& name : {"ps9", "supply-shortage", "reject-rework"}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      CAPTURE(name);
      CAPTURE(seed);
      const auto out = fixtures::run(name, seed);
      const auto sc = fixtures::scenario(name);
      const auto& trigger = sc.rules[0].trigger;
      const auto events = fixtures::logged_events(out.session_log);
      std::int64_t matches = 0;
      std::optional<Tick> trigger_time;
      for (const auto& e : events) {
        if (trigger.matches(e) && ++matches == trigger.occurrence) {
          trigger_time = e.time;
          break;
        }
      }
      REQUIRE(trigger_time);
      const EventKind injected = sc.rules[0].actions[0].injection.kind == InjectionKind::MachineDown
                                     ? EventKind::MachineDown
                                 : sc.rules[0].actions[0].injection.kind == InjectionKind::SupplyShortage
                                     ? EventKind::SupplyBlocked
                                     : EventKind::ProductRejected;
      const auto it = std::find_if(events.begin(), events.end(),
                                   [&](const SimEvent& e) { return e.kind == injected; });
      REQUIRE(it != events.end());
      CHECK(it->time == *trigger_time);
    }
  }
}

TEST_CASE("PS9 breakdown lands on the first departure from M2 at t=35") {
  const auto events = fixtures::logged_events(fixtures::run("ps9", 1).session_log);
  const auto first = std::find_if(events.begin(), events.end(), [](const SimEvent& e) {
    return e.kind == EventKind::ShuttleDeparted && e.machine == "M2";
  });
  REQUIRE(first != events.end());
  CHECK(first->time == 35);
  CHECK(first->shuttle == "S1");
  CHECK(first->order == "O1");
}

TEST_CASE("property: null scenario is neutral") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    const auto book = fixtures::random_orders(rng, 1 + static_cast<int>(rng() % 6));
    const auto sc = null_scenario();
    harness::RunOptions detached;
    detached.scenario_manager = false;
    const auto with = fixtures::run(sc, 5, book);
    const auto without = fixtures::run(sc, 5, book, detached);
    CHECK(fixtures::logged_events(with.session_log) == fixtures::logged_events(without.session_log));
    CHECK(with.command_log == without.command_log);
  }
}

TEST_CASE("category registry") {
  const auto& reg = CategoryRegistry::builtin();
  CHECK(reg.classify("PS6") == Category::Quality);
  CHECK(reg.classify("#PS6") == Category::Quality);
  CHECK(reg.classify("PS8") == Category::Supply);
  CHECK(reg.classify("Query 3") == Category::OrderManagement);
  CHECK(reg.classify("PD1") == Category::DynamicReconfiguration);
  CHECK(reg.classify("Example 1") == Category::DynamicReconfiguration);
  CHECK(reg.classify("BD2") == Category::OrderManagement);
  CHECK_THROWS_AS(reg.classify("PS16"), std::out_of_range);
  CHECK_THROWS_AS(reg.classify("Query 1"), std::out_of_range);
  CHECK(reg.labels().size() == 30);
}

TEST_CASE("registry data file matches the built-in table and its recorded hash") {
  const auto text = fixtures::read("category_registry.json");
  CHECK(text == CategoryRegistry::builtin_document());
  const auto recorded = fixtures::read("category_registry.json.sha256");
  CHECK(recorded.substr(0, 64) == sha256_hex(text));
  CHECK(CategoryRegistry::from_json(text).labels() == CategoryRegistry::builtin().labels());
  CHECK_THROWS_AS(CategoryRegistry::from_json(R"({"weather": ["PS1"]})"), ValidationError);
  CHECK_THROWS_AS(CategoryRegistry::from_json(R"({"quality": ["PS6"], "supply": ["PS6"]})"),
                  ValidationError);
}

#include "support/fixtures.hpp"

#include "hmsbench/common/hash.hpp"
#include "hmsbench/emulation/kernel.hpp"

#include <doctest.h>

#include <random>

using namespace hmsbench;
using namespace hmsbench::emulation;
using control::ControlCommand;

namespace {

std::string minicell_with(const std::string& from, const std::string& to) {
  std::string doc = fixtures::read("minicell/model.json");
  const auto pos = doc.find(from);
  REQUIRE(pos != std::string::npos);
  doc.replace(pos, from.size(), to);
  return doc;
}

std::string load_error(const std::string& doc) {
  try {
    load_model(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

// Releases O1 at t=0 and returns the emulator positioned at t=0 with the
// release batch consumed.
Emulator released(std::initializer_list<const char*> ids) {
  Emulator emu(fixtures::minicell());
  std::vector<ControlCommand> cmds;
  for (const char* id : ids) {
    cmds.push_back(ControlCommand::release(id, 0, "test"));
  }
  const auto batch = emu.advance(cmds);
  REQUIRE(batch.size() == ids.size());
  return emu;
}

std::vector<SimEvent> step(Emulator& emu, std::vector<ControlCommand> cmds = {}) {
  return emu.advance(cmds);
}

bool has(const std::vector<SimEvent>& batch, EventKind kind) {
  for (const auto& e : batch) {
    if (e.kind == kind) {
      return true;
    }
  }
  return false;
}

// Random command sequence drawn from ids that exist in MiniCell. Many of
// them are refused by the kernel, which is part of what is exercised.
std::vector<std::vector<ControlCommand>> random_script(std::mt19937_64& rng) {
  static const std::vector<std::string> nodes{"IN", "M1", "M2", "OUT"};
  static const std::vector<std::string> shuttles{"S1", "S2"};
  static const std::vector<std::string> orders{"O1", "O2", "O3", "O4"};
  std::vector<std::vector<ControlCommand>> script;
  const int rounds = 10 + static_cast<int>(rng() % 40);
  for (int r = 0; r < rounds; ++r) {
    std::vector<ControlCommand> cmds;
    const int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      const auto& order = orders[rng() % orders.size()];
      switch (rng() % 5) {
      case 0:
        cmds.push_back(ControlCommand::release(order, static_cast<Tick>(rng() % 30), "h"));
        break;
      case 1:
      case 2:
        cmds.push_back(ControlCommand::move(shuttles[rng() % 2], nodes[rng() % nodes.size()],
                                            rng() % 2 ? order : std::string{}, "h"));
        break;
      case 3: {
        const bool m1 = rng() % 2;
        cmds.push_back(ControlCommand::start(m1 ? "M1" : "M2", order, m1 ? "A" : "B", "h"));
        break;
      }
      default:
        cmds.push_back(ControlCommand::cancel(order, "h"));
        break;
      }
    }
    script.push_back(std::move(cmds));
  }
  return script;
}

std::string run_script(const std::vector<std::vector<ControlCommand>>& script,
                       std::uint64_t injection_seed) {
  Emulator emu(fixtures::minicell());
  std::mt19937_64 inj(injection_seed);
  std::string stream;
  for (const auto& cmds : script) {
    if (inj() % 7 == 0) {
      Injection i;
      i.kind = inj() % 2 ? InjectionKind::MachineDown : InjectionKind::SupplyShortage;
      i.target = inj() % 2 ? "M1" : "M2";
      i.duration = 1 + static_cast<Tick>(inj() % 30);
      for (const auto& e : emu.apply_injection(i)) {
        stream += canonical_dump(event_to_json(e)) + "\n";
      }
    }
    for (const auto& e : emu.advance(cmds)) {
      stream += canonical_dump(event_to_json(e)) + "\n";
    }
  }
  while (emu.has_pending()) {
    for (const auto& e : emu.advance({})) {
      stream += canonical_dump(event_to_json(e)) + "\n";
    }
  }
  return stream;
}

} // namespace

TEST_CASE("minicell fixture parses to two machines and four nodes") {
  const auto& m = fixtures::minicell();
  CHECK(m.machines.size() == 2);
  CHECK(m.nodes.size() == 4);
  CHECK(m.shuttle_count == 2);
  CHECK(m.input_node == "IN");
  CHECK(m.output_node == "OUT");
  CHECK(m.find_machine("M1")->durations.at("A") == 10);
  CHECK(m.find_machine("M2")->durations.at("B") == 15);
  CHECK(m.shuttle_ids() == std::vector<std::string>{"S1", "S2"});
  Routes routes(m);
  CHECK(routes.distance("IN", "M2") == 5);
  CHECK(routes.distance("IN", "IN") == 0);
  CHECK_FALSE(routes.distance("IN", "NOPE"));
}

TEST_CASE("model validation names the offending field") {
  SUBCASE("duplicate machine id") {
    const auto msg = load_error(minicell_with("\"id\": \"M2\"", "\"id\": \"M1\""));
    CHECK(msg.find("M1") != std::string::npos);
    CHECK(msg.find("duplicate") != std::string::npos);
  }
  SUBCASE("zero travel") {
    const auto msg = load_error(minicell_with("\"travel\": 5", "\"travel\": 0"));
    CHECK(msg.find("non-positive duration") != std::string::npos);
    CHECK(msg.find("transport.edges[0].travel") != std::string::npos);
  }
  SUBCASE("zero processing time") {
    const auto msg = load_error(minicell_with("\"A\": 10", "\"A\": 0"));
    CHECK(msg.find("machines[0].operations.A") != std::string::npos);
  }
  SUBCASE("no shuttles") {
    CHECK(load_error(minicell_with("\"count\": 2", "\"count\": 0")).find("shuttles.count") == 0);
  }
  SUBCASE("disconnected graph") {
    auto doc = json::parse(fixtures::read("minicell/model.json"));
    auto& edges = doc["transport"]["edges"];
    json kept = json::array();
    for (const auto& e : edges) {
      if (e["to"] != "OUT") {
        kept.push_back(e);
      }
    }
    edges = kept;
    CHECK(load_error(doc.dump()).find("not strongly connected") != std::string::npos);
  }
  SUBCASE("malformed document") { CHECK_THROWS_AS(load_model("{\"machines\": ["), ValidationError); }
  SUBCASE("extra top-level key") {
    auto doc = json::parse(fixtures::read("minicell/model.json"));
    doc["orders"] = json::array();
    CHECK_THROWS_AS(load_model(doc.dump()), ValidationError);
  }
}

TEST_CASE("model round-trips through its JSON form") {
  const auto& m = fixtures::minicell();
  CHECK(model_from_json(model_to_json(m)) == m);
}

TEST_CASE("move shuttle IN to M1 departs at 0 and arrives at 5") {
  Emulator emu(fixtures::minicell());
  const auto batch = step(emu, {ControlCommand::move("S1", "M1", "", "t")});
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].kind == EventKind::ShuttleDeparted);
  CHECK(batch[0].shuttle == "S1");
  CHECK(batch[0].node == "IN");
  CHECK(batch[0].time == 0);
  CHECK(emu.clock() == 0);

  const auto next = step(emu);
  REQUIRE(next.size() == 1);
  CHECK(next[0].kind == EventKind::ShuttleArrived);
  CHECK(next[0].machine == "M1");
  CHECK(next[0].time == 5);
  CHECK(next[0].seq == batch[0].seq + 1);
}

TEST_CASE("nothing pending and no commands is a fixed point") {
  Emulator emu(fixtures::minicell());
  const auto before = emu.snapshot();
  CHECK(step(emu).empty());
  CHECK(emu.clock() == 0);
  CHECK(emu.snapshot() == before);
}

TEST_CASE("op started at 5 on M1 finishes at 15") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
  const auto arrived = step(emu);
  REQUIRE(arrived.size() == 1);
  CHECK(arrived[0].time == 5);
  CHECK(arrived[0].order == "O1");
  const auto started = step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
  REQUIRE(started.size() == 1);
  CHECK(started[0].kind == EventKind::OpStarted);
  CHECK(started[0].time == 5);
  const auto finished = step(emu);
  REQUIRE(finished.size() == 1);
  CHECK(finished[0].kind == EventKind::OpFinished);
  CHECK(finished[0].machine == "M1");
  CHECK(finished[0].order == "O1");
  CHECK(finished[0].time == 15);
}

TEST_CASE("order delivered at the output node completes") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "OUT", "O1", "t")});
  const auto batch = step(emu);
  REQUIRE(batch.size() == 2);
  CHECK(batch[0].kind == EventKind::OrderCompleted);
  CHECK(batch[1].kind == EventKind::ShuttleArrived);
  CHECK(emu.all_orders_terminal());
}

TEST_CASE("machine down injections") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "M2", "", "t")});
  step(emu, {}); // t=5
  emu.schedule_wakeup(20);
  CHECK(step(emu).empty());
  REQUIRE(emu.clock() == 20);

  SUBCASE("idle machine goes down and refuses starts") {
    Injection down{InjectionKind::MachineDown, "M2", 50, RejectPolicy::Rework};
    const auto events = emu.apply_injection(down);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::MachineDown);
    CHECK(events[0].machine == "M2");
    CHECK(events[0].time == 20);

    const auto rejected = step(emu, {ControlCommand::start("M2", "O1", "B", "t")});
    REQUIRE(rejected.size() == 1);
    CHECK(rejected[0].kind == EventKind::CommandRejected);
    CHECK(rejected[0].detail == "start-op: machine down");
    CHECK(rejected[0].time == 20);
  }
  SUBCASE("repair after the duration") {
    emu.apply_injection({InjectionKind::MachineDown, "M2", 50, RejectPolicy::Rework});
    const auto batch = step(emu);
    REQUIRE_FALSE(batch.empty());
    const auto& up = batch.back();
    CHECK(up.kind == EventKind::MachineUp);
    CHECK(up.time == 70);
  }
  SUBCASE("second down is a no-op with a warning") {
    emu.apply_injection({InjectionKind::MachineDown, "M2", std::nullopt, RejectPolicy::Rework});
    const auto again =
        emu.apply_injection({InjectionKind::MachineDown, "M2", std::nullopt, RejectPolicy::Rework});
    CHECK(again.empty());
    REQUIRE(emu.warnings().size() == 1);
    CHECK(emu.warnings()[0].find("already-down") != std::string::npos);
  }
  SUBCASE("bad targets throw") {
    CHECK_THROWS_AS(emu.apply_injection({InjectionKind::MachineDown, "M9", 5, RejectPolicy::Rework}),
                    KernelError);
    CHECK_THROWS_AS(emu.apply_injection({InjectionKind::MachineDown, "M1", 0, RejectPolicy::Rework}),
                    KernelError);
    CHECK_THROWS_AS(
        emu.apply_injection({InjectionKind::ProductReject, "O9", std::nullopt, RejectPolicy::Rework}),
        KernelError);
  }
}

TEST_CASE("start on a down machine is rejected by event") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
  step(emu); // t=5, O1 at M1
  emu.apply_injection({InjectionKind::MachineDown, "M1", 10, RejectPolicy::Rework});
  const auto batch = step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].kind == EventKind::CommandRejected);
  CHECK(batch[0].machine == "M1");
  CHECK(batch[0].detail == "start-op: machine down");
  CHECK(batch[0].time == 5);
}

TEST_CASE("preempted work restarts from zero after repair") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
  step(emu);
  step(emu, {ControlCommand::start("M1", "O1", "A", "t")}); // started at 5
  emu.schedule_wakeup(8);
  step(emu);
  const auto down = emu.apply_injection({InjectionKind::MachineDown, "M1", 4, RejectPolicy::Rework});
  REQUIRE(down.size() == 1);
  CHECK(down[0].order == "O1");
  CHECK(down[0].detail == "preempted");
  const auto up = step(emu);
  REQUIRE(up.size() == 1);
  CHECK(up[0].kind == EventKind::MachineUp);
  CHECK(up[0].time == 12);
  const auto restarted = step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
  REQUIRE(restarted.size() == 1);
  CHECK(restarted[0].kind == EventKind::OpStarted);
  const auto finished = step(emu);
  REQUIRE(finished.size() == 1);
  CHECK(finished[0].time == 22);
}

TEST_CASE("product reject on a shuttle keeps the order for rework") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "OUT", "O1", "t")});
  const auto events =
      emu.apply_injection({InjectionKind::ProductReject, "O1", std::nullopt, RejectPolicy::Rework});
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == EventKind::ProductRejected);
  CHECK(events[0].shuttle == "S1");
  CHECK(events[0].detail == "rework");
  // Held for rework: arriving at OUT does not complete it.
  const auto arrival = step(emu);
  CHECK_FALSE(has(arrival, EventKind::OrderCompleted));
  CHECK(emu.state().orders.at("O1").place == OrderPlace::AtNode);
  // Another operation clears the hold.
  step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
  step(emu);
  step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
  step(emu);
  step(emu, {ControlCommand::move("S1", "OUT", "O1", "t")});
  CHECK(has(step(emu), EventKind::OrderCompleted));
}

TEST_CASE("scrap removes the order") {
  auto emu = released({"O1"});
  const auto events =
      emu.apply_injection({InjectionKind::ProductReject, "O1", std::nullopt, RejectPolicy::Scrap});
  REQUIRE(events.size() == 1);
  CHECK(events[0].node == "IN");
  CHECK(events[0].detail == "scrap");
  CHECK(emu.all_orders_terminal());
}

TEST_CASE("supply shortage blocks starts until restored") {
  auto emu = released({"O1"});
  step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
  step(emu);
  const auto blocked =
      emu.apply_injection({InjectionKind::SupplyShortage, "M1", 7, RejectPolicy::Rework});
  REQUIRE(blocked.size() == 1);
  CHECK(blocked[0].kind == EventKind::SupplyBlocked);
  const auto rejected = step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
  REQUIRE(rejected.size() == 1);
  CHECK(rejected[0].detail == "start-op: supply blocked");
  const auto restored = step(emu);
  REQUIRE(restored.size() == 1);
  CHECK(restored[0].kind == EventKind::SupplyRestored);
  CHECK(restored[0].time == 12);
}

TEST_CASE("unknown entities in commands throw") {
  Emulator emu(fixtures::minicell());
  CHECK_THROWS_AS(step(emu, {ControlCommand::move("S9", "M1", "", "t")}), KernelError);
  CHECK_THROWS_AS(step(emu, {ControlCommand::move("S1", "X", "", "t")}), KernelError);
  CHECK_THROWS_AS(step(emu, {ControlCommand::start("M7", "O1", "A", "t")}), KernelError);
}

TEST_CASE("state-dependent refusals") {
  auto emu = released({"O1", "O2"});
  SUBCASE("moving shuttle") {
    step(emu, {ControlCommand::move("S1", "M1", "", "t")});
    const auto b = step(emu, {ControlCommand::move("S1", "M2", "", "t")});
    REQUIRE(b.size() == 1);
    CHECK(b[0].detail == "move-shuttle: shuttle moving");
    CHECK(b[0].node == "IN");
  }
  SUBCASE("order elsewhere") {
    const auto b = step(emu, {ControlCommand::start("M1", "O1", "A", "t")});
    REQUIRE(b.size() == 1);
    CHECK(b[0].detail == "start-op: order not at machine");
  }
  SUBCASE("incapable machine") {
    const auto b = step(emu, {ControlCommand::start("M1", "O1", "B", "t")});
    REQUIRE(b.size() == 1);
    CHECK(b[0].detail == "start-op: operation B not supported");
  }
  SUBCASE("duplicate release") {
    const auto b = step(emu, {ControlCommand::release("O1", 0, "t")});
    REQUIRE(b.size() == 1);
    CHECK(b[0].detail == "release-order: duplicate order");
  }
  SUBCASE("cancel at a node") {
    const auto b = step(emu, {ControlCommand::cancel("O2", "t")});
    REQUIRE(b.size() == 1);
    CHECK(b[0].kind == EventKind::OrderCancelled);
    CHECK(b[0].node == "IN");
  }
}

TEST_CASE("same-tick events follow kind rank then subject") {
  auto emu = released({"O1", "O2"});
  const auto b = step(emu, {ControlCommand::move("S2", "M1", "O2", "t"),
                            ControlCommand::move("S1", "M1", "O1", "t")});
  REQUIRE(b.size() == 2);
  CHECK(b[0].shuttle == "S1");
  CHECK(b[1].shuttle == "S2");
  CHECK(b[1].seq == b[0].seq + 1);
}

TEST_CASE("snapshot round-trips") {
  SUBCASE("initial state") {
    Emulator emu(fixtures::minicell());
    const auto snap = emu.snapshot();
    const auto back = Emulator::restore(snap);
    CHECK(back == emu);
    CHECK(back.snapshot() == snap);
    CHECK(Emulator(fixtures::minicell()).snapshot() == snap);
  }
  SUBCASE("after three advances the replica advances identically") {
    auto emu = released({"O1", "O2"});
    step(emu, {ControlCommand::move("S1", "M1", "O1", "t")});
    step(emu, {ControlCommand::move("S2", "M1", "O2", "t")});
    auto copy = Emulator::restore(emu.snapshot());
    CHECK(copy == emu);
    const std::vector<ControlCommand> cmds{ControlCommand::start("M1", "O1", "A", "t")};
    CHECK(copy.advance(cmds) == emu.advance(cmds));
    CHECK(copy.snapshot() == emu.snapshot());
  }
}

TEST_CASE("property: determinism, total order and status legality over random scripts") {
  std::mt19937_64 rng(20261019);
  for (int trial = 0; trial < 120; ++trial) {
    const auto script = random_script(rng);
    const std::uint64_t inj_seed = rng();
    std::string first;
    try {
      first = run_script(script, inj_seed);
    } catch (const KernelError&) {
      FAIL("random script referenced an unknown entity");
    }
    CHECK(first == run_script(script, inj_seed));

    Tick last_time = -1;
    std::uint64_t last_seq = 0;
    std::map<std::string, std::string> status;
    for (const auto& line : fixtures::lines(first)) {
      const auto e = event_from_json(json::parse(line));
      CHECK(e.seq == last_seq + 1);
      CHECK(e.time >= last_time);
      last_seq = e.seq;
      last_time = e.time;
      switch (e.kind) {
      case EventKind::MachineDown:
        CHECK(status[e.machine + "/down"] != "down");
        status[e.machine + "/down"] = "down";
        break;
      case EventKind::MachineUp:
        CHECK(status[e.machine + "/down"] == "down");
        status[e.machine + "/down"] = "up";
        break;
      case EventKind::SupplyBlocked:
        status[e.machine + "/supply"] = "blocked";
        break;
      case EventKind::SupplyRestored:
        status[e.machine + "/supply"] = "ok";
        break;
      case EventKind::OpStarted:
        CHECK(status[e.machine + "/down"] != "down");
        CHECK(status[e.machine + "/supply"] != "blocked");
        break;
      default:
        break;
      }
    }
  }
}

TEST_CASE("property: snapshot replay at a random cut") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto script = random_script(rng);
    Emulator emu(fixtures::minicell());
    const std::size_t cut = rng() % script.size();
    for (std::size_t i = 0; i < cut; ++i) {
      emu.advance(script[i]);
    }
    auto copy = Emulator::restore(emu.snapshot());
    for (std::size_t i = cut; i < script.size(); ++i) {
      REQUIRE(copy.advance(script[i]) == emu.advance(script[i]));
    }
    CHECK(copy.snapshot() == emu.snapshot());
  }
}

TEST_CASE("leanness: one model document for every shipped scenario") {
  const auto hash = sha256_hex(fixtures::read("minicell/model.json"));
  CHECK(hash == fixtures::minicell_hash());
  for (const auto& name : fixtures::kScenarioFiles) {
    const auto out = fixtures::run(name, 1);
    CHECK(out.session_log.find(hash) != std::string::npos);
  }
}

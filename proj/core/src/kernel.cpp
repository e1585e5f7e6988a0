#include "hmsbench/emulation/kernel.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace hmsbench::emulation {

using control::CommandKind;
using control::ControlCommand;

namespace {

constexpr std::array<std::string_view, 5> kInjectionNames{
    "machine-down", "machine-up", "supply-shortage", "supply-restore", "product-reject"};
constexpr std::array<std::string_view, 2> kPolicyNames{"rework", "scrap"};
constexpr std::array<std::string_view, 7> kTransitionNames{
    "emit", "arrive", "finish-op", "machine-up", "supply-restore", "release", "wakeup"};
constexpr std::array<std::string_view, 5> kPlaceNames{"scheduled", "at-node", "on-shuttle",
                                                      "in-process", "done"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) {
      return static_cast<Enum>(i);
    }
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
Enum require_enum(const std::array<std::string_view, N>& names, const json& value,
                  const char* what) {
  auto parsed = lookup<Enum>(names, value.get<std::string>());
  if (!parsed) {
    throw ValidationError("snapshot", std::string("unknown ") + what);
  }
  return *parsed;
}

auto event_order_key(const SimEvent& e) {
  return std::tie(e.kind, e.machine, e.shuttle, e.order, e.node, e.detail);
}

} // namespace

std::string_view to_string(InjectionKind kind) {
  return kInjectionNames[static_cast<std::size_t>(kind)];
}
std::optional<InjectionKind> parse_injection_kind(std::string_view name) {
  return lookup<InjectionKind>(kInjectionNames, name);
}
std::string_view to_string(RejectPolicy policy) {
  return kPolicyNames[static_cast<std::size_t>(policy)];
}
std::optional<RejectPolicy> parse_reject_policy(std::string_view name) {
  return lookup<RejectPolicy>(kPolicyNames, name);
}

Emulator::Emulator(ShopModel model)
    : model_(std::make_shared<const ShopModel>(std::move(model))),
      routes_(std::make_shared<const Routes>(*model_)) {
  for (const auto& m : model_->machines) {
    state_.machines.emplace(m.id, MachineState{});
  }
  for (const auto& id : model_->shuttle_ids()) {
    state_.shuttles.emplace(id, ShuttleState{model_->shuttle_home, false, {}, 0, {}});
  }
}

Emulator::Emulator(std::shared_ptr<const ShopModel> model, KernelState state)
    : model_(std::move(model)), routes_(std::make_shared<const Routes>(*model_)),
      state_(std::move(state)) {}

std::optional<Tick> Emulator::next_time() const {
  if (state_.pending.empty()) {
    return std::nullopt;
  }
  return state_.pending.begin()->first.first;
}

bool Emulator::all_orders_terminal() const {
  return std::all_of(state_.orders.begin(), state_.orders.end(),
                     [](const auto& kv) { return kv.second.place == OrderPlace::Done; });
}

void Emulator::schedule(Tick time, PendingTransition transition) {
  state_.pending.emplace(std::make_pair(time, state_.next_insertion++), std::move(transition));
}

void Emulator::unschedule(TransitionKind kind, const std::string& machine) {
  std::erase_if(state_.pending, [&](const auto& kv) {
    return kv.second.kind == kind && kv.second.machine == machine;
  });
}

void Emulator::schedule_wakeup(Tick time) {
  if (time < state_.clock) {
    throw KernelError("wakeup at " + std::to_string(time) + " is in the past");
  }
  PendingTransition t;
  t.kind = TransitionKind::Wakeup;
  schedule(time, std::move(t));
}

std::string Emulator::machine_at(const std::string& node) const {
  return model_->find_machine(node) ? node : std::string{};
}

SimEvent Emulator::stamp(EventKind kind) {
  SimEvent e;
  e.time = state_.clock;
  e.seq = state_.next_seq++;
  e.kind = kind;
  return e;
}

void Emulator::reject(const ControlCommand& c, const std::string& reason) {
  PendingTransition t;
  t.event = EventKind::CommandRejected;
  t.machine = c.machine;
  t.shuttle = c.shuttle;
  t.order = c.order;
  t.node = c.kind == CommandKind::MoveShuttle ? state_.shuttles.at(c.shuttle).node : std::string{};
  t.detail = std::string(control::to_string(c.kind)) + ": " + reason;
  emit_now(std::move(t));
}

void Emulator::apply(const ControlCommand& c) {
  switch (c.kind) {
  case CommandKind::EndOfRound:
    return;

  case CommandKind::MoveShuttle: {
    auto sit = state_.shuttles.find(c.shuttle);
    if (sit == state_.shuttles.end()) {
      throw KernelError("move-shuttle: unknown shuttle " + c.shuttle);
    }
    ShuttleState& shuttle = sit->second;
    if (!model_->has_node(c.destination)) {
      throw KernelError("move-shuttle: unroutable destination " + c.destination);
    }
    if (shuttle.moving) {
      return reject(c, "shuttle moving");
    }
    const auto travel = routes_->distance(shuttle.node, c.destination);
    if (!travel) {
      throw KernelError("move-shuttle: unroutable destination " + c.destination + " from " +
                        shuttle.node);
    }
    if (*travel == 0) {
      return reject(c, "already at destination");
    }
    if (!c.order.empty()) {
      auto oit = state_.orders.find(c.order);
      if (oit == state_.orders.end() || oit->second.place != OrderPlace::AtNode ||
          oit->second.location != shuttle.node) {
        return reject(c, "order not available at " + shuttle.node);
      }
      oit->second.place = OrderPlace::OnShuttle;
      oit->second.location = c.shuttle;
    }
    PendingTransition departed;
    departed.event = EventKind::ShuttleDeparted;
    departed.shuttle = c.shuttle;
    departed.node = shuttle.node;
    departed.machine = machine_at(shuttle.node);
    departed.order = c.order;
    emit_now(std::move(departed));

    shuttle.moving = true;
    shuttle.destination = c.destination;
    shuttle.arrival = state_.clock + *travel;
    shuttle.carrying = c.order;
    PendingTransition arrive;
    arrive.kind = TransitionKind::Arrive;
    arrive.shuttle = c.shuttle;
    arrive.node = c.destination;
    schedule(shuttle.arrival, std::move(arrive));
    return;
  }

  case CommandKind::StartOp: {
    auto mit = state_.machines.find(c.machine);
    if (mit == state_.machines.end()) {
      throw KernelError("start-op: unknown machine " + c.machine);
    }
    MachineState& machine = mit->second;
    const MachineSpec& spec = *model_->find_machine(c.machine);
    if (machine.down) {
      return reject(c, "machine down");
    }
    if (machine.blocked) {
      return reject(c, "supply blocked");
    }
    if (machine.busy()) {
      return reject(c, "machine busy");
    }
    if (!spec.capable(c.operation)) {
      return reject(c, "operation " + c.operation + " not supported");
    }
    auto oit = state_.orders.find(c.order);
    if (oit == state_.orders.end() || oit->second.place != OrderPlace::AtNode ||
        oit->second.location != c.machine) {
      return reject(c, "order not at machine");
    }
    oit->second.place = OrderPlace::InProcess;
    oit->second.location = c.machine;
    oit->second.rework_hold = false;
    machine.order = c.order;
    machine.operation = c.operation;
    machine.finish = state_.clock + spec.durations.at(c.operation);

    PendingTransition started;
    started.event = EventKind::OpStarted;
    started.machine = c.machine;
    started.order = c.order;
    started.node = c.machine;
    started.detail = c.operation;
    emit_now(std::move(started));

    PendingTransition finish;
    finish.kind = TransitionKind::FinishOp;
    finish.machine = c.machine;
    schedule(machine.finish, std::move(finish));
    return;
  }

  case CommandKind::ReleaseOrder: {
    if (c.order.empty()) {
      throw KernelError("release-order: empty order id");
    }
    if (state_.orders.count(c.order)) {
      return reject(c, "duplicate order");
    }
    state_.orders.emplace(c.order, OrderState{OrderPlace::Scheduled, {}, false});
    PendingTransition release;
    release.kind = TransitionKind::Release;
    release.order = c.order;
    schedule(std::max(c.release_time, state_.clock), std::move(release));
    return;
  }

  case CommandKind::CancelOrder: {
    auto oit = state_.orders.find(c.order);
    if (oit == state_.orders.end()) {
      return reject(c, "unknown order");
    }
    OrderState& order = oit->second;
    switch (order.place) {
    case OrderPlace::Done:
      return reject(c, "order terminal");
    case OrderPlace::InProcess:
      return reject(c, "order in process");
    case OrderPlace::Scheduled:
      // Never entered the shop: drop the release silently.
      std::erase_if(state_.pending, [&](const auto& kv) {
        return kv.second.kind == TransitionKind::Release && kv.second.order == c.order;
      });
      order.place = OrderPlace::Done;
      order.location.clear();
      return;
    case OrderPlace::OnShuttle:
    case OrderPlace::AtNode: {
      PendingTransition cancelled;
      cancelled.event = EventKind::OrderCancelled;
      cancelled.order = c.order;
      if (order.place == OrderPlace::OnShuttle) {
        cancelled.shuttle = order.location;
        state_.shuttles.at(order.location).carrying.clear();
      } else {
        cancelled.node = order.location;
      }
      order.place = OrderPlace::Done;
      order.location.clear();
      emit_now(std::move(cancelled));
      return;
    }
    }
    return;
  }
  }
}

std::vector<SimEvent> Emulator::advance(std::span<const ControlCommand> commands) {
  for (const auto& c : commands) {
    apply(c);
  }
  if (state_.pending.empty()) {
    return {};
  }
  const Tick now = state_.pending.begin()->first.first;
  state_.clock = now;

  struct Staged {
    SimEvent event;
    std::uint64_t insertion;
  };
  std::vector<Staged> staged;
  auto stage = [&](SimEvent e, std::uint64_t insertion) {
    e.time = now;
    staged.push_back(Staged{std::move(e), insertion});
  };

  while (!state_.pending.empty() && state_.pending.begin()->first.first == now) {
    auto node = state_.pending.extract(state_.pending.begin());
    const std::uint64_t insertion = node.key().second;
    PendingTransition& t = node.mapped();
    SimEvent e;
    e.machine = t.machine;
    e.shuttle = t.shuttle;
    e.order = t.order;
    e.node = t.node;
    e.detail = t.detail;

    switch (t.kind) {
    case TransitionKind::Wakeup:
      break;
    case TransitionKind::Emit:
      e.kind = t.event;
      stage(std::move(e), insertion);
      break;
    case TransitionKind::Arrive: {
      ShuttleState& shuttle = state_.shuttles.at(t.shuttle);
      shuttle.moving = false;
      shuttle.node = t.node;
      shuttle.destination.clear();
      const std::string carried = std::exchange(shuttle.carrying, {});
      e.kind = EventKind::ShuttleArrived;
      e.machine = machine_at(t.node);
      e.order = carried;
      stage(e, insertion);
      if (!carried.empty()) {
        OrderState& order = state_.orders.at(carried);
        order.place = OrderPlace::AtNode;
        order.location = t.node;
        if (t.node == model_->output_node && !order.rework_hold) {
          order.place = OrderPlace::Done;
          order.location.clear();
          SimEvent done;
          done.kind = EventKind::OrderCompleted;
          done.order = carried;
          done.node = t.node;
          stage(std::move(done), insertion);
        }
      }
      break;
    }
    case TransitionKind::FinishOp: {
      MachineState& machine = state_.machines.at(t.machine);
      e.kind = EventKind::OpFinished;
      e.order = machine.order;
      e.node = t.machine;
      e.detail = machine.operation;
      OrderState& order = state_.orders.at(machine.order);
      order.place = OrderPlace::AtNode;
      order.location = t.machine;
      machine.order.clear();
      machine.operation.clear();
      machine.finish = 0;
      stage(std::move(e), insertion);
      break;
    }
    case TransitionKind::MachineUp:
      state_.machines.at(t.machine).down = false;
      e.kind = EventKind::MachineUp;
      stage(std::move(e), insertion);
      break;
    case TransitionKind::SupplyRestore:
      state_.machines.at(t.machine).blocked = false;
      e.kind = EventKind::SupplyRestored;
      stage(std::move(e), insertion);
      break;
    case TransitionKind::Release: {
      OrderState& order = state_.orders.at(t.order);
      order.place = OrderPlace::AtNode;
      order.location = model_->input_node;
      e.kind = EventKind::OrderReleased;
      e.node = model_->input_node;
      stage(std::move(e), insertion);
      break;
    }
    }
  }

  std::stable_sort(staged.begin(), staged.end(), [](const Staged& a, const Staged& b) {
    const auto ka = event_order_key(a.event);
    const auto kb = event_order_key(b.event);
    if (ka != kb) {
      return ka < kb;
    }
    return a.insertion < b.insertion;
  });
  std::vector<SimEvent> batch;
  batch.reserve(staged.size());
  for (auto& s : staged) {
    s.event.seq = state_.next_seq++;
    batch.push_back(std::move(s.event));
  }
  return batch;
}

std::vector<SimEvent> Emulator::apply_injection(const Injection& inj) {
  if (inj.duration && *inj.duration <= 0) {
    throw KernelError(std::string(to_string(inj.kind)) + ": non-positive duration");
  }
  auto warn = [&](const std::string& message) {
    state_.warnings.push_back("t=" + std::to_string(state_.clock) + " " + message);
    return std::vector<SimEvent>{};
  };

  if (inj.kind == InjectionKind::ProductReject) {
    auto oit = state_.orders.find(inj.target);
    if (oit == state_.orders.end()) {
      throw KernelError("product-reject: unknown order " + inj.target);
    }
    OrderState& order = oit->second;
    if (order.place == OrderPlace::Done || order.place == OrderPlace::Scheduled) {
      return warn("product-reject on order " + inj.target + " outside the shop ignored");
    }
    SimEvent e = stamp(EventKind::ProductRejected);
    e.order = inj.target;
    e.detail = std::string(to_string(inj.policy));
    switch (order.place) {
    case OrderPlace::InProcess: {
      MachineState& machine = state_.machines.at(order.location);
      unschedule(TransitionKind::FinishOp, order.location);
      machine.order.clear();
      machine.operation.clear();
      machine.finish = 0;
      e.machine = order.location;
      e.node = order.location;
      order.place = OrderPlace::AtNode;
      break;
    }
    case OrderPlace::OnShuttle:
      e.shuttle = order.location;
      if (inj.policy == RejectPolicy::Scrap) {
        state_.shuttles.at(order.location).carrying.clear();
      }
      break;
    default:
      e.node = order.location;
      break;
    }
    if (inj.policy == RejectPolicy::Scrap) {
      order.place = OrderPlace::Done;
      order.location.clear();
    } else {
      order.rework_hold = true;
    }
    return {e};
  }

  auto mit = state_.machines.find(inj.target);
  if (mit == state_.machines.end()) {
    throw KernelError(std::string(to_string(inj.kind)) + ": unknown machine " + inj.target);
  }
  MachineState& machine = mit->second;
  switch (inj.kind) {
  case InjectionKind::MachineDown: {
    if (machine.down) {
      return warn("machine-down on already-down machine " + inj.target + " ignored");
    }
    machine.down = true;
    SimEvent e = stamp(EventKind::MachineDown);
    e.machine = inj.target;
    if (machine.busy()) {
      // Preempted work is lost and restarts from zero after repair.
      unschedule(TransitionKind::FinishOp, inj.target);
      OrderState& order = state_.orders.at(machine.order);
      order.place = OrderPlace::AtNode;
      order.location = inj.target;
      e.order = machine.order;
      e.detail = "preempted";
      machine.order.clear();
      machine.operation.clear();
      machine.finish = 0;
    }
    if (inj.duration) {
      PendingTransition up;
      up.kind = TransitionKind::MachineUp;
      up.machine = inj.target;
      schedule(state_.clock + *inj.duration, std::move(up));
    }
    return {e};
  }
  case InjectionKind::MachineUp: {
    if (!machine.down) {
      return warn("machine-up on running machine " + inj.target + " ignored");
    }
    machine.down = false;
    unschedule(TransitionKind::MachineUp, inj.target);
    SimEvent e = stamp(EventKind::MachineUp);
    e.machine = inj.target;
    return {e};
  }
  case InjectionKind::SupplyShortage: {
    if (machine.blocked) {
      return warn("supply-shortage on blocked machine " + inj.target + " ignored");
    }
    machine.blocked = true;
    SimEvent e = stamp(EventKind::SupplyBlocked);
    e.machine = inj.target;
    if (inj.duration) {
      PendingTransition restore;
      restore.kind = TransitionKind::SupplyRestore;
      restore.machine = inj.target;
      schedule(state_.clock + *inj.duration, std::move(restore));
    }
    return {e};
  }
  case InjectionKind::SupplyRestore: {
    if (!machine.blocked) {
      return warn("supply-restore on unblocked machine " + inj.target + " ignored");
    }
    machine.blocked = false;
    unschedule(TransitionKind::SupplyRestore, inj.target);
    SimEvent e = stamp(EventKind::SupplyRestored);
    e.machine = inj.target;
    return {e};
  }
  case InjectionKind::ProductReject:
    break;
  }
  return {};
}

std::string Emulator::snapshot() const {
  json pending = json::array();
  for (const auto& [key, t] : state_.pending) {
    pending.push_back({{"t", key.first},
                       {"i", key.second},
                       {"kind", std::string(kTransitionNames[static_cast<std::size_t>(t.kind)])},
                       {"event", std::string(to_string(t.event))},
                       {"machine", t.machine},
                       {"shuttle", t.shuttle},
                       {"order", t.order},
                       {"node", t.node},
                       {"detail", t.detail}});
  }
  json machines = json::object();
  for (const auto& [id, m] : state_.machines) {
    machines[id] = {{"down", m.down},         {"blocked", m.blocked}, {"order", m.order},
                    {"operation", m.operation}, {"finish", m.finish}};
  }
  json shuttles = json::object();
  for (const auto& [id, s] : state_.shuttles) {
    shuttles[id] = {{"node", s.node},       {"moving", s.moving},    {"destination", s.destination},
                    {"arrival", s.arrival}, {"carrying", s.carrying}};
  }
  json orders = json::object();
  for (const auto& [id, o] : state_.orders) {
    orders[id] = {{"place", std::string(kPlaceNames[static_cast<std::size_t>(o.place)])},
                  {"location", o.location},
                  {"rework_hold", o.rework_hold}};
  }
  const json doc = {{"model", model_to_json(*model_)},
                    {"clock", state_.clock},
                    {"next_seq", state_.next_seq},
                    {"next_insertion", state_.next_insertion},
                    {"pending", pending},
                    {"machines", machines},
                    {"shuttles", shuttles},
                    {"orders", orders},
                    {"warnings", state_.warnings}};
  return canonical_dump(doc);
}

Emulator Emulator::restore(std::string_view snapshot) {
  const json doc = parse_document(snapshot, "snapshot");
  auto model = std::make_shared<const ShopModel>(model_from_json(require(doc, "model", "")));
  KernelState s;
  s.clock = require_int(doc, "clock", "");
  s.next_seq = doc.at("next_seq").get<std::uint64_t>();
  s.next_insertion = doc.at("next_insertion").get<std::uint64_t>();
  for (const auto& p : doc.at("pending")) {
    PendingTransition t;
    t.kind = require_enum<TransitionKind>(kTransitionNames, p.at("kind"), "transition");
    auto ev = parse_event_kind(p.at("event").get<std::string>());
    if (!ev) {
      throw ValidationError("snapshot.pending", "unknown event kind");
    }
    t.event = *ev;
    t.machine = p.at("machine").get<std::string>();
    t.shuttle = p.at("shuttle").get<std::string>();
    t.order = p.at("order").get<std::string>();
    t.node = p.at("node").get<std::string>();
    t.detail = p.at("detail").get<std::string>();
    s.pending.emplace(std::make_pair(p.at("t").get<Tick>(), p.at("i").get<std::uint64_t>()),
                      std::move(t));
  }
  for (const auto& [id, m] : doc.at("machines").items()) {
    s.machines.emplace(id, MachineState{m.at("down").get<bool>(), m.at("blocked").get<bool>(),
                                        m.at("order").get<std::string>(),
                                        m.at("operation").get<std::string>(),
                                        m.at("finish").get<Tick>()});
  }
  for (const auto& [id, sh] : doc.at("shuttles").items()) {
    s.shuttles.emplace(id, ShuttleState{sh.at("node").get<std::string>(),
                                        sh.at("moving").get<bool>(),
                                        sh.at("destination").get<std::string>(),
                                        sh.at("arrival").get<Tick>(),
                                        sh.at("carrying").get<std::string>()});
  }
  for (const auto& [id, o] : doc.at("orders").items()) {
    s.orders.emplace(id, OrderState{require_enum<OrderPlace>(kPlaceNames, o.at("place"), "place"),
                                    o.at("location").get<std::string>(),
                                    o.at("rework_hold").get<bool>()});
  }
  s.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return Emulator(std::move(model), std::move(s));
}

} // namespace hmsbench::emulation

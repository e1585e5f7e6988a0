#include "hmsbench/control/reference_control.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <tuple>
#include <utility>

namespace hmsbench::control {

using emulation::EventKind;
using emulation::SimEvent;

LatencyClock wall_clock() {
  return [] {
    return static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                         std::chrono::steady_clock::now().time_since_epoch())
                                         .count());
  };
}

ReferenceControl::ReferenceControl(const emulation::ShopModel& model,
                                   std::vector<ProductOrder> order_book, LatencyClock clock)
    : model_(std::make_shared<const emulation::ShopModel>(model)),
      routes_(std::make_unique<emulation::Routes>(*model_)), clock_(std::move(clock)) {
  for (const auto& m : model_->machines) {
    ResourceHolon r;
    r.holon_id = "resource/" + m.id;
    r.id = m.id;
    r.spec = &m;
    resources_.emplace(m.id, std::move(r));
  }
  for (const auto& id : model_->shuttle_ids()) {
    shuttles_.emplace(id, ShuttleView{id, model_->shuttle_home, false, {}, {}, {}});
  }
  for (std::size_t i = 0; i < order_book.size(); ++i) {
    const std::string path = "orders[" + std::to_string(i) + "]";
    if (orders_.count(order_book[i].id)) {
      throw ValidationError(path + ".id", "duplicate order id " + order_book[i].id);
    }
    for (const auto& op : order_book[i].routing) {
      if (!model_->has_machine_capable(op)) {
        throw ValidationError(path + ".routing", "no capable machine for operation " + op);
      }
    }
    add_order(std::move(order_book[i]), 0);
  }
}

OrderHolon& ReferenceControl::add_order(ProductOrder order, Tick now) {
  OrderHolon holon;
  holon.holon_id = "order/" + order.id;
  order.status = OrderStatus::Pending;
  holon.order = std::move(order);
  const std::string id = holon.order.id;
  record("order.due", id, static_cast<double>(holon.order.due), now);
  arrival_order_.push_back(id);
  return orders_.emplace(id, std::move(holon)).first->second;
}

const OrderHolon* ReferenceControl::order(const std::string& id) const {
  auto it = orders_.find(id);
  return it == orders_.end() ? nullptr : &it->second;
}

const ResourceHolon* ReferenceControl::resource(const std::string& id) const {
  auto it = resources_.find(id);
  return it == resources_.end() ? nullptr : &it->second;
}

void ReferenceControl::record(std::string name, std::string subject, double value, Tick time) {
  il::TaggedRecord r;
  r.tag = il::StreamTag::Flow2;
  r.time = time;
  r.seq = next_data_seq_++;
  r.payload = il::ControlDataPoint{std::move(name), std::move(subject), value};
  data_points_.push_back(std::move(r));
}

std::vector<il::TaggedRecord> ReferenceControl::take_data_points() {
  return std::exchange(data_points_, {});
}

std::vector<il::Metric> ReferenceControl::export_control_kpi() const {
  const double mean = rounds_ == 0 ? 0.0 : latency_sum_us_ / static_cast<double>(rounds_);
  return {
      {"commands_issued", static_cast<double>(commands_issued_)},
      {"decision_latency_max_us", latency_max_us_},
      {"decision_latency_mean_us", mean},
      {"directives_handled", static_cast<double>(directives_handled_)},
      {"reschedules", static_cast<double>(reschedules_)},
      {"rounds", static_cast<double>(rounds_)},
  };
}

void ReferenceControl::drop_assignment(OrderHolon& order, Tick now) {
  for (auto& [_, shuttle] : shuttles_) {
    if (shuttle.pickup_for == order.order.id) {
      shuttle.pickup_for.clear();
    }
  }
  if (order.assigned_machine.empty()) {
    return;
  }
  auto& machine = resources_.at(order.assigned_machine);
  if (machine.reserved_for == order.order.id) {
    machine.reserved_for.clear();
  }
  order.assigned_machine.clear();
  ++reschedules_;
  record("reschedule", order.order.id, 1.0, now);
}

void ReferenceControl::observe(const SimEvent& e) {
  auto find_order = [&](const std::string& id) -> OrderHolon* {
    auto it = orders_.find(id);
    return it == orders_.end() ? nullptr : &it->second;
  };
  auto leave_shop = [&](OrderHolon& o, OrderStatus status) {
    o.order.status = status;
    o.place = OrderPlace::Gone;
    o.location.clear();
    drop_assignment(o, e.time);
  };

  switch (e.kind) {
  case EventKind::OrderReleased:
    if (auto* o = find_order(e.order)) {
      o->order.status = OrderStatus::Active;
      o->place = OrderPlace::AtNode;
      o->location = e.node;
    }
    break;
  case EventKind::ShuttleDeparted:
    break;
  case EventKind::ShuttleArrived: {
    ShuttleView& s = shuttles_.at(e.shuttle);
    s.node = e.node;
    s.moving = false;
    s.destination.clear();
    s.carrying.clear();
    if (auto* o = find_order(e.order); o && !o->terminal()) {
      o->place = OrderPlace::AtNode;
      o->location = e.node;
    }
    break;
  }
  case EventKind::OpStarted:
    if (auto* o = find_order(e.order)) {
      o->place = OrderPlace::InProcess;
      o->location = e.machine;
    }
    break;
  case EventKind::OpFinished: {
    ResourceHolon& m = resources_.at(e.machine);
    m.busy_with.clear();
    if (auto* o = find_order(e.order)) {
      ++o->step;
      o->place = OrderPlace::AtNode;
      o->location = e.machine;
      o->assigned_machine.clear();
    }
    break;
  }
  case EventKind::MachineDown: {
    ResourceHolon& m = resources_.at(e.machine);
    m.down = true;
    if (!e.order.empty()) {
      m.busy_with.clear();
      if (auto* o = find_order(e.order)) {
        o->place = OrderPlace::AtNode;
        o->location = e.machine;
        drop_assignment(*o, e.time);
      }
    }
    if (!m.reserved_for.empty()) {
      drop_assignment(orders_.at(m.reserved_for), e.time);
    }
    break;
  }
  case EventKind::MachineUp:
    resources_.at(e.machine).down = false;
    break;
  case EventKind::SupplyBlocked: {
    ResourceHolon& m = resources_.at(e.machine);
    m.blocked = true;
    if (!m.reserved_for.empty()) {
      drop_assignment(orders_.at(m.reserved_for), e.time);
    }
    break;
  }
  case EventKind::SupplyRestored:
    resources_.at(e.machine).blocked = false;
    break;
  case EventKind::ProductRejected: {
    OrderHolon* o = find_order(e.order);
    if (!o) {
      break;
    }
    if (!e.machine.empty()) {
      resources_.at(e.machine).busy_with.clear();
      o->place = OrderPlace::AtNode;
      o->location = e.machine;
    } else if (e.detail == "rework" && o->step > 0) {
      // The last finished operation is redone.
      --o->step;
    }
    if (e.detail == "scrap") {
      if (!e.shuttle.empty()) {
        shuttles_.at(e.shuttle).carrying.clear();
      }
      leave_shop(*o, OrderStatus::Scrapped);
    } else {
      drop_assignment(*o, e.time);
    }
    break;
  }
  case EventKind::OrderCompleted:
    if (auto* o = find_order(e.order)) {
      leave_shop(*o, OrderStatus::Completed);
    }
    break;
  case EventKind::OrderCancelled:
    if (auto* o = find_order(e.order)) {
      if (!e.shuttle.empty()) {
        shuttles_.at(e.shuttle).carrying.clear();
      }
      leave_shop(*o, OrderStatus::Cancelled);
    }
    break;
  case EventKind::CommandRejected: {
    // Undo the optimistic view update made when the command was issued.
    if (e.detail.starts_with("move-shuttle")) {
      ShuttleView& s = shuttles_.at(e.shuttle);
      s.moving = false;
      s.destination.clear();
      s.carrying.clear();
      s.node = e.node;
      if (auto* o = find_order(e.order); o && o->place == OrderPlace::OnShuttle) {
        o->place = OrderPlace::AtNode;
        o->location = e.node;
      }
    } else if (e.detail.starts_with("start-op")) {
      resources_.at(e.machine).busy_with.clear();
      if (auto* o = find_order(e.order); o && o->place == OrderPlace::InProcess) {
        o->place = OrderPlace::AtNode;
        o->location = e.machine;
      }
    }
    break;
  }
  }
}

std::vector<OrderHolon*> ReferenceControl::ranked_orders() {
  std::vector<OrderHolon*> ranked;
  for (auto& [_, o] : orders_) {
    if (o.order.status == OrderStatus::Active && !o.cancel_requested) {
      ranked.push_back(&o);
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const OrderHolon* a, const OrderHolon* b) {
    return std::make_tuple(-a->order.priority, a->order.due, a->order.id) <
           std::make_tuple(-b->order.priority, b->order.due, b->order.id);
  });
  return ranked;
}

std::string ReferenceControl::target_node(const OrderHolon& o) const {
  if (!o.assigned_machine.empty()) {
    return o.assigned_machine;
  }
  if (o.routing_done()) {
    return model_->output_node;
  }
  return {};
}

std::vector<ControlCommand> ReferenceControl::decide(Tick now) {
  std::vector<ControlCommand> out;

  for (const auto& id : arrival_order_) {
    OrderHolon& o = orders_.at(id);
    if (o.release_issued) {
      continue;
    }
    if (o.cancel_requested) {
      o.order.status = OrderStatus::Cancelled;
      o.place = OrderPlace::Gone;
      continue;
    }
    out.push_back(ControlCommand::release(id, std::max(o.order.release, now), o.holon_id));
    o.release_issued = true;
  }

  // Cancellations take effect at routing-step boundaries only.
  for (auto& [id, o] : orders_) {
    if (!o.cancel_requested || o.terminal() || !o.release_issued) {
      continue;
    }
    if (o.place == OrderPlace::Unreleased || o.place == OrderPlace::AtNode) {
      out.push_back(ControlCommand::cancel(id, o.holon_id));
      o.order.status = OrderStatus::Cancelled;
      o.place = OrderPlace::Gone;
      o.location.clear();
    }
  }

  // Shuttles that reached a reserved pickup load and go.
  for (auto& [sid, s] : shuttles_) {
    if (s.moving || s.pickup_for.empty()) {
      continue;
    }
    OrderHolon& o = orders_.at(std::exchange(s.pickup_for, {}));
    const std::string target = target_node(o);
    if (o.terminal() || o.place != OrderPlace::AtNode || o.location != s.node || target.empty() ||
        target == s.node) {
      continue;
    }
    out.push_back(ControlCommand::move(sid, target, o.order.id, o.holon_id));
    s.moving = true;
    s.destination = target;
    s.carrying = o.order.id;
    o.place = OrderPlace::OnShuttle;
    o.location = sid;
  }

  auto ranked = ranked_orders();

  // Each idle, available, unreserved machine takes the best waiting order it
  // can process.
  for (auto& [mid, m] : resources_) {
    if (!m.available() || !m.busy_with.empty() || !m.reserved_for.empty()) {
      continue;
    }
    for (OrderHolon* o : ranked) {
      if (o->place != OrderPlace::AtNode || !o->assigned_machine.empty() || o->routing_done() ||
          !m.spec->capable(o->order.routing[o->step])) {
        continue;
      }
      o->assigned_machine = mid;
      m.reserved_for = o->order.id;
      break;
    }
  }

  for (OrderHolon* o : ranked) {
    if (o->place != OrderPlace::AtNode) {
      continue;
    }
    const std::string target = target_node(*o);
    if (target.empty() || target == o->location) {
      continue;
    }
    const bool pickup_pending =
        std::any_of(shuttles_.begin(), shuttles_.end(),
                    [&](const auto& kv) { return kv.second.pickup_for == o->order.id; });
    if (pickup_pending) {
      continue;
    }
    ShuttleView* best = nullptr;
    Tick best_distance = std::numeric_limits<Tick>::max();
    for (auto& [sid, s] : shuttles_) {
      if (s.moving || !s.pickup_for.empty()) {
        continue;
      }
      const auto d = routes_->distance(s.node, o->location);
      if (!d) {
        continue;
      }
      // Shuttles iterate in id order; ties on distance go to the lower node id.
      if (!best || *d < best_distance || (*d == best_distance && s.node < best->node)) {
        best = &s;
        best_distance = *d;
      }
    }
    if (!best) {
      continue;
    }
    if (best_distance == 0) {
      out.push_back(ControlCommand::move(best->id, target, o->order.id, o->holon_id));
      best->moving = true;
      best->destination = target;
      best->carrying = o->order.id;
      o->place = OrderPlace::OnShuttle;
      o->location = best->id;
    } else {
      out.push_back(ControlCommand::move(best->id, o->location, {}, o->holon_id));
      best->moving = true;
      best->destination = o->location;
      best->pickup_for = o->order.id;
    }
  }

  for (auto& [mid, m] : resources_) {
    if (!m.available() || !m.busy_with.empty() || m.reserved_for.empty()) {
      continue;
    }
    OrderHolon& o = orders_.at(m.reserved_for);
    if (o.place != OrderPlace::AtNode || o.location != mid) {
      continue;
    }
    out.push_back(ControlCommand::start(mid, o.order.id, o.order.routing[o.step], m.holon_id));
    m.busy_with = o.order.id;
    m.reserved_for.clear();
    o.place = OrderPlace::InProcess;
  }

  commands_issued_ += out.size();
  out.push_back(ControlCommand::end_of_round());
  return out;
}

std::vector<ControlCommand> ReferenceControl::on_notifications(Tick now,
                                                               std::span<const SimEvent> batch) {
  const std::int64_t started = clock_ ? clock_() : 0;
  now_ = now;
  for (const auto& e : batch) {
    observe(e);
  }
  auto commands = decide(now);
  const double latency_us = clock_ ? static_cast<double>(clock_() - started) / 1000.0 : 0.0;
  ++rounds_;
  latency_sum_us_ += latency_us;
  latency_max_us_ = std::max(latency_max_us_, latency_us);
  record("decision_latency_us", {}, latency_us, now);
  return commands;
}

DirectiveAck ReferenceControl::apply_directive(Tick now, const ControlDirective& d) {
  auto fail = [](std::string message) { return DirectiveAck{false, std::move(message)}; };
  switch (d.kind) {
  case DirectiveKind::InsertOrder: {
    if (orders_.count(d.order.id)) {
      return fail("duplicate order id " + d.order.id);
    }
    for (const auto& op : d.order.routing) {
      if (!model_->has_machine_capable(op)) {
        return fail("no capable machine for operation " + op);
      }
    }
    ProductOrder order = d.order;
    order.release = std::max(order.release, now);
    if (order.due < order.release) {
      return fail("due date before release for " + order.id);
    }
    add_order(std::move(order), now);
    break;
  }
  case DirectiveKind::CancelOrder:
  case DirectiveKind::SetPriority: {
    auto it = orders_.find(d.order_id);
    if (it == orders_.end()) {
      return fail("unknown order " + d.order_id);
    }
    OrderHolon& o = it->second;
    if (o.terminal()) {
      return fail("order " + d.order_id + " already " + std::string(to_string(o.order.status)));
    }
    if (d.kind == DirectiveKind::SetPriority) {
      o.order.priority = d.priority;
    } else if (!o.cancel_requested) {
      o.cancel_requested = true;
      if (o.place != OrderPlace::InProcess) {
        drop_assignment(o, now);
      }
    }
    break;
  }
  case DirectiveKind::AnnounceBreakdown:
  case DirectiveKind::AnnounceSupplyBlock: {
    auto it = resources_.find(d.machine);
    if (it == resources_.end()) {
      return fail("unknown machine " + d.machine);
    }
    ResourceHolon& m = it->second;
    if (d.kind == DirectiveKind::AnnounceBreakdown) {
      m.down = true;
    } else {
      m.blocked = true;
    }
    if (!m.reserved_for.empty()) {
      drop_assignment(orders_.at(m.reserved_for), now);
    }
    break;
  }
  }
  ++directives_handled_;
  return {};
}

} // namespace hmsbench::control

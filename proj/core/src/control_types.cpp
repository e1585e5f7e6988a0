#include "hmsbench/control/types.hpp"

#include <array>
#include <set>

namespace hmsbench::control {

namespace {

constexpr std::array<std::string_view, 5> kStatusNames{"pending", "active", "completed",
                                                       "cancelled", "scrapped"};
constexpr std::array<std::string_view, 5> kCommandNames{"move-shuttle", "start-op",
                                                        "release-order", "cancel-order",
                                                        "end-of-round"};
constexpr std::array<std::string_view, 5> kDirectiveNames{
    "insert-order", "cancel-order", "set-priority", "announce-breakdown",
    "announce-supply-block"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) {
      return static_cast<Enum>(i);
    }
  }
  return std::nullopt;
}

std::string optional_string(const json& body, const char* key, const std::string& path) {
  return body.contains(key) ? require_string(body, key, path) : std::string{};
}

} // namespace

std::string_view to_string(OrderStatus status) {
  return kStatusNames[static_cast<std::size_t>(status)];
}
std::string_view to_string(CommandKind kind) { return kCommandNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(DirectiveKind kind) {
  return kDirectiveNames[static_cast<std::size_t>(kind)];
}

std::optional<CommandKind> parse_command_kind(std::string_view name) {
  return lookup<CommandKind>(kCommandNames, name);
}
std::optional<DirectiveKind> parse_directive_kind(std::string_view name) {
  return lookup<DirectiveKind>(kDirectiveNames, name);
}

json order_to_json(const ProductOrder& order) {
  return {{"id", order.id},
          {"routing", order.routing},
          {"release", order.release},
          {"due", order.due},
          {"priority", order.priority}};
}

ProductOrder order_from_json(const json& value, const std::string& path) {
  reject_unknown_keys(value, {"id", "routing", "release", "due", "priority"}, path);
  ProductOrder order;
  order.id = require_string(value, "id", path);
  if (order.id.empty()) {
    throw ValidationError(path + ".id", "empty order id");
  }
  const json& routing = require(value, "routing", path);
  if (!routing.is_array() || routing.empty()) {
    throw ValidationError(path + ".routing", "routing must be a non-empty list");
  }
  for (const auto& step : routing) {
    if (!step.is_string()) {
      throw ValidationError(path + ".routing", "operation kinds must be strings");
    }
    order.routing.push_back(step.get<std::string>());
  }
  order.release = value.contains("release") ? require_int(value, "release", path) : 0;
  order.due = require_int(value, "due", path);
  order.priority =
      value.contains("priority") ? static_cast<int>(require_int(value, "priority", path)) : 0;
  if (order.release < 0) {
    throw ValidationError(path + ".release", "negative release time");
  }
  if (order.due < order.release) {
    throw ValidationError(path + ".due", "due date before release time");
  }
  return order;
}

std::vector<ProductOrder> load_order_book(std::string_view document) {
  const json doc = parse_document(document, "orders");
  if (!doc.is_array()) {
    throw ValidationError("orders", "expected a list of orders");
  }
  std::vector<ProductOrder> book;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "orders[" + std::to_string(i) + "]";
    ProductOrder order = order_from_json(doc[i], path);
    if (!ids.insert(order.id).second) {
      throw ValidationError(path + ".id", "duplicate order id " + order.id);
    }
    book.push_back(std::move(order));
  }
  return book;
}

ControlCommand ControlCommand::move(std::string shuttle, std::string destination,
                                    std::string order, std::string holon) {
  ControlCommand c;
  c.kind = CommandKind::MoveShuttle;
  c.shuttle = std::move(shuttle);
  c.destination = std::move(destination);
  c.order = std::move(order);
  c.holon = std::move(holon);
  return c;
}

ControlCommand ControlCommand::start(std::string machine, std::string order,
                                     std::string operation, std::string holon) {
  ControlCommand c;
  c.kind = CommandKind::StartOp;
  c.machine = std::move(machine);
  c.order = std::move(order);
  c.operation = std::move(operation);
  c.holon = std::move(holon);
  return c;
}

ControlCommand ControlCommand::release(std::string order, Tick at, std::string holon) {
  ControlCommand c;
  c.kind = CommandKind::ReleaseOrder;
  c.order = std::move(order);
  c.release_time = at;
  c.holon = std::move(holon);
  return c;
}

ControlCommand ControlCommand::cancel(std::string order, std::string holon) {
  ControlCommand c;
  c.kind = CommandKind::CancelOrder;
  c.order = std::move(order);
  c.holon = std::move(holon);
  return c;
}

ControlCommand ControlCommand::end_of_round() { return ControlCommand{}; }

json command_body(const ControlCommand& c) {
  json body = json::object();
  if (!c.holon.empty()) body["holon"] = c.holon;
  switch (c.kind) {
  case CommandKind::MoveShuttle:
    body["shuttle"] = c.shuttle;
    body["to"] = c.destination;
    if (!c.order.empty()) body["order"] = c.order;
    break;
  case CommandKind::StartOp:
    body["machine"] = c.machine;
    body["order"] = c.order;
    body["op"] = c.operation;
    break;
  case CommandKind::ReleaseOrder:
    body["order"] = c.order;
    body["at"] = c.release_time;
    break;
  case CommandKind::CancelOrder:
    body["order"] = c.order;
    break;
  case CommandKind::EndOfRound:
    break;
  }
  return body;
}

ControlCommand command_from_body(CommandKind kind, const json& body) {
  const std::string path = "body";
  if (!body.is_object()) {
    throw ValidationError(path, "expected an object");
  }
  ControlCommand c;
  c.kind = kind;
  c.holon = optional_string(body, "holon", path);
  switch (kind) {
  case CommandKind::MoveShuttle:
    reject_unknown_keys(body, {"holon", "shuttle", "to", "order"}, path);
    c.shuttle = require_string(body, "shuttle", path);
    c.destination = require_string(body, "to", path);
    c.order = optional_string(body, "order", path);
    break;
  case CommandKind::StartOp:
    reject_unknown_keys(body, {"holon", "machine", "order", "op"}, path);
    c.machine = require_string(body, "machine", path);
    c.order = require_string(body, "order", path);
    c.operation = require_string(body, "op", path);
    break;
  case CommandKind::ReleaseOrder:
    reject_unknown_keys(body, {"holon", "order", "at"}, path);
    c.order = require_string(body, "order", path);
    c.release_time = require_int(body, "at", path);
    break;
  case CommandKind::CancelOrder:
    reject_unknown_keys(body, {"holon", "order"}, path);
    c.order = require_string(body, "order", path);
    break;
  case CommandKind::EndOfRound:
    reject_unknown_keys(body, {"holon"}, path);
    break;
  }
  return c;
}

json directive_body(const ControlDirective& d) {
  switch (d.kind) {
  case DirectiveKind::InsertOrder:
    return {{"order", order_to_json(d.order)}};
  case DirectiveKind::CancelOrder:
    return {{"order", d.order_id}};
  case DirectiveKind::SetPriority:
    return {{"order", d.order_id}, {"priority", d.priority}};
  case DirectiveKind::AnnounceBreakdown:
  case DirectiveKind::AnnounceSupplyBlock:
    return {{"machine", d.machine}};
  }
  return json::object();
}

ControlDirective directive_from_body(DirectiveKind kind, const json& body) {
  const std::string path = "body";
  ControlDirective d;
  d.kind = kind;
  switch (kind) {
  case DirectiveKind::InsertOrder:
    require_keys_exactly(body, {"order"}, path);
    d.order = order_from_json(body.at("order"), "body.order");
    break;
  case DirectiveKind::CancelOrder:
    require_keys_exactly(body, {"order"}, path);
    d.order_id = require_string(body, "order", path);
    break;
  case DirectiveKind::SetPriority:
    require_keys_exactly(body, {"order", "priority"}, path);
    d.order_id = require_string(body, "order", path);
    d.priority = static_cast<int>(require_int(body, "priority", path));
    break;
  case DirectiveKind::AnnounceBreakdown:
  case DirectiveKind::AnnounceSupplyBlock:
    require_keys_exactly(body, {"machine"}, path);
    d.machine = require_string(body, "machine", path);
    break;
  }
  return d;
}

} // namespace hmsbench::control

#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::control {

enum class OrderStatus : std::uint8_t { Pending, Active, Completed, Cancelled, Scrapped };

std::string_view to_string(OrderStatus status);

struct ProductOrder {
  std::string id;
  std::vector<std::string> routing;
  Tick release = 0;
  Tick due = 0;
  int priority = 0;
  OrderStatus status = OrderStatus::Pending;

  bool operator==(const ProductOrder&) const = default;
};

json order_to_json(const ProductOrder& order);
ProductOrder order_from_json(const json& value, const std::string& path);

/// Parses an order book file: a JSON list of orders with unique ids.
std::vector<ProductOrder> load_order_book(std::string_view document);

enum class CommandKind : std::uint8_t { MoveShuttle, StartOp, ReleaseOrder, CancelOrder, EndOfRound };

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view name);

/// A control request to the emulation. Which fields are meaningful depends
/// on `kind`:
///   move-shuttle   shuttle, destination, order (optional load)
///   start-op       machine, order, operation
///   release-order  order, release_time
///   cancel-order   order
struct ControlCommand {
  CommandKind kind = CommandKind::EndOfRound;
  std::string shuttle;
  std::string destination;
  std::string machine;
  std::string order;
  std::string operation;
  Tick release_time = 0;
  std::string holon;

  static ControlCommand move(std::string shuttle, std::string destination, std::string order,
                             std::string holon);
  static ControlCommand start(std::string machine, std::string order, std::string operation,
                              std::string holon);
  static ControlCommand release(std::string order, Tick at, std::string holon);
  static ControlCommand cancel(std::string order, std::string holon);
  static ControlCommand end_of_round();

  bool operator==(const ControlCommand&) const = default;
};

json command_body(const ControlCommand& command);
ControlCommand command_from_body(CommandKind kind, const json& body);

enum class DirectiveKind : std::uint8_t {
  InsertOrder,
  CancelOrder,
  SetPriority,
  AnnounceBreakdown,
  AnnounceSupplyBlock,
};

std::string_view to_string(DirectiveKind kind);
std::optional<DirectiveKind> parse_directive_kind(std::string_view name);

/// Scenario-manager instruction to the control system.
struct ControlDirective {
  DirectiveKind kind = DirectiveKind::AnnounceBreakdown;
  ProductOrder order;    // insert-order
  std::string order_id;  // cancel-order, set-priority
  std::string machine;   // announce-*
  int priority = 0;      // set-priority

  bool operator==(const ControlDirective&) const = default;
};

json directive_body(const ControlDirective& directive);
ControlDirective directive_from_body(DirectiveKind kind, const json& body);

struct DirectiveAck {
  bool ok = true;
  std::string error;

  bool operator==(const DirectiveAck&) const = default;
};

} // namespace hmsbench::control

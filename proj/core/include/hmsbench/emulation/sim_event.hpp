#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hmsbench::emulation {

/// Declared in lexical order of the wire names; the enum order is the
/// tie-break rank for events sharing a tick.
enum class EventKind : std::uint8_t {
  CommandRejected,
  MachineDown,
  MachineUp,
  OpFinished,
  OpStarted,
  OrderCancelled,
  OrderCompleted,
  OrderReleased,
  ProductRejected,
  ShuttleArrived,
  ShuttleDeparted,
  SupplyBlocked,
  SupplyRestored,
};

inline constexpr std::array<EventKind, 13> kAllEventKinds{
    EventKind::CommandRejected, EventKind::MachineDown,     EventKind::MachineUp,
    EventKind::OpFinished,      EventKind::OpStarted,       EventKind::OrderCancelled,
    EventKind::OrderCompleted,  EventKind::OrderReleased,   EventKind::ProductRejected,
    EventKind::ShuttleArrived,  EventKind::ShuttleDeparted, EventKind::SupplyBlocked,
    EventKind::SupplyRestored,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

/// One production event. Subject fields are empty when not applicable.
/// `machine` is also set for shuttle events at a machine node, so filters
/// such as "departure from M2" read naturally.
struct SimEvent {
  Tick time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::OrderReleased;
  std::string machine;
  std::string shuttle;
  std::string order;
  std::string node;
  std::string detail;

  /// Value of a subject field by name ("machine", "shuttle", "order",
  /// "node", "detail"); nullopt for an unknown field name.
  std::optional<std::string_view> subject(std::string_view field) const;

  bool operator==(const SimEvent&) const = default;
};

json event_to_json(const SimEvent& event);
SimEvent event_from_json(const json& value);

} // namespace hmsbench::emulation

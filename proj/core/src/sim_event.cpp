#include "hmsbench/emulation/sim_event.hpp"

namespace hmsbench::emulation {

namespace {
constexpr std::array<std::string_view, 13> kNames{
    "command-rejected", "machine-down",    "machine-up",      "op-finished",   "op-started",
    "order-cancelled",  "order-completed", "order-released",  "product-rejected",
    "shuttle-arrived",  "shuttle-departed", "supply-blocked", "supply-restored",
};
} // namespace

std::string_view to_string(EventKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) {
      return static_cast<EventKind>(i);
    }
  }
  return std::nullopt;
}

std::optional<std::string_view> SimEvent::subject(std::string_view field) const {
  if (field == "machine") return std::string_view(machine);
  if (field == "shuttle") return std::string_view(shuttle);
  if (field == "order") return std::string_view(order);
  if (field == "node") return std::string_view(node);
  if (field == "detail") return std::string_view(detail);
  return std::nullopt;
}

json event_to_json(const SimEvent& e) {
  json out = {{"t", e.time}, {"seq", e.seq}, {"kind", std::string(to_string(e.kind))}};
  if (!e.machine.empty()) out["machine"] = e.machine;
  if (!e.shuttle.empty()) out["shuttle"] = e.shuttle;
  if (!e.order.empty()) out["order"] = e.order;
  if (!e.node.empty()) out["node"] = e.node;
  if (!e.detail.empty()) out["detail"] = e.detail;
  return out;
}

SimEvent event_from_json(const json& value) {
  reject_unknown_keys(value, {"t", "seq", "kind", "machine", "shuttle", "order", "node", "detail"},
                      "event");
  SimEvent e;
  e.time = require_int(value, "t", "event");
  const std::int64_t seq = require_int(value, "seq", "event");
  if (e.time < 0 || seq < 0) {
    throw ValidationError("event", "negative time or seq");
  }
  e.seq = static_cast<std::uint64_t>(seq);
  const std::string kind = require_string(value, "kind", "event");
  auto parsed = parse_event_kind(kind);
  if (!parsed) {
    throw ValidationError("event.kind", "unknown event kind " + kind);
  }
  e.kind = *parsed;
  auto opt = [&](const char* key, std::string& dst) {
    if (value.contains(key)) {
      dst = require_string(value, key, "event");
    }
  };
  opt("machine", e.machine);
  opt("shuttle", e.shuttle);
  opt("order", e.order);
  opt("node", e.node);
  opt("detail", e.detail);
  return e;
}

} // namespace hmsbench::emulation

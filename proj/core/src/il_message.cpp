#include "hmsbench/il/message.hpp"
#include "hmsbench/il/protocol.hpp"
#include "hmsbench/il/taps.hpp"

#include <algorithm>
#include <array>

namespace hmsbench::il {

namespace {

constexpr std::array<std::string_view, 5> kDirectionNames{"notification", "command", "directive",
                                                          "tap", "session"};
constexpr std::array<std::string_view, 7> kTagNames{"FLOW1", "FLOW2", "FLOW3", "FLOW4",
                                                    "FLOW5", "FLOW6", "FLOW7"};

constexpr std::array<std::string_view, 1> kNotificationKinds{"batch"};
constexpr std::array<std::string_view, 6> kCommandKinds{
    "move-shuttle", "start-op", "release-order", "cancel-order", "end-of-round", "ack"};
constexpr std::array<std::string_view, 5> kDirectiveKinds{
    "insert-order", "cancel-order", "set-priority", "announce-breakdown", "announce-supply-block"};
constexpr std::array<std::string_view, 3> kSessionKinds{"hello", "finish", "bye"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

} // namespace

std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }

std::optional<Direction> parse_direction(std::string_view name) {
  for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == name) {
      return static_cast<Direction>(i);
    }
  }
  return std::nullopt;
}

std::string_view to_string(StreamTag tag) { return kTagNames[static_cast<std::size_t>(tag) - 1]; }

std::optional<StreamTag> parse_stream_tag(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) {
      return static_cast<StreamTag>(i + 1);
    }
  }
  return std::nullopt;
}

bool is_known_kind(Direction direction, std::string_view kind) {
  switch (direction) {
  case Direction::Notification:
    return contains(kNotificationKinds, kind);
  case Direction::Command:
    return contains(kCommandKinds, kind);
  case Direction::Directive:
    return contains(kDirectiveKinds, kind);
  case Direction::Tap: {
    auto tag = parse_stream_tag(kind);
    return tag && is_kpi_tap(*tag);
  }
  case Direction::Session:
    return contains(kSessionKinds, kind);
  }
  return false;
}

std::string encode(const InterfaceMessage& m) {
  if (!is_known_kind(m.direction, m.kind)) {
    throw ValidationError("kind", "unknown payload kind '" + m.kind + "' for " +
                                      std::string(to_string(m.direction)));
  }
  const json doc = {{"v", m.version},    {"role", std::string(to_string(m.direction))},
                    {"round", m.round},  {"t", m.time},
                    {"kind", m.kind},    {"body", m.body},
                    {"corr", m.corr}};
  std::string line(kWirePrefix);
  line += canonical_dump(doc);
  return line;
}

InterfaceMessage decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') {
    line.remove_suffix(1);
  }
  if (line.substr(0, kWirePrefix.size()) != kWirePrefix) {
    throw ParseError(0, "missing IL1 prefix");
  }
  const std::size_t base = kWirePrefix.size();
  const std::string_view text = line.substr(base);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(base + at, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(base, "message is not a JSON object");
  }
  doc = canonicalize(doc);
  static const std::array<std::string, 7> kKeys{"v", "role", "round", "t", "kind", "body", "corr"};
  for (const auto& key : kKeys) {
    if (!doc.contains(key)) {
      throw ParseError(base, "missing key '" + key + "'");
    }
  }
  if (doc.size() != kKeys.size()) {
    throw ParseError(base, "unexpected extra keys");
  }
  InterfaceMessage m;
  if (!doc["v"].is_string() || !doc["role"].is_string() || !doc["kind"].is_string() ||
      !doc["corr"].is_string()) {
    throw ParseError(base, "v, role, kind and corr must be strings");
  }
  if (!doc["round"].is_number_integer() || doc["round"].get<std::int64_t>() < 0 ||
      !doc["t"].is_number_integer() || doc["t"].get<std::int64_t>() < 0) {
    throw ParseError(base, "round and t must be non-negative integers");
  }
  if (!doc["body"].is_object()) {
    throw ParseError(base, "body must be an object");
  }
  m.version = doc["v"].get<std::string>();
  const auto role = doc["role"].get<std::string>();
  auto direction = parse_direction(role);
  if (!direction) {
    throw ParseError(base, "unknown role '" + role + "'");
  }
  m.direction = *direction;
  m.round = doc["round"].get<std::uint64_t>();
  m.time = doc["t"].get<Tick>();
  m.kind = doc["kind"].get<std::string>();
  if (!is_known_kind(m.direction, m.kind)) {
    throw ParseError(base, "unknown payload kind '" + m.kind + "' for " + role);
  }
  m.body = canonicalize(doc["body"]);
  m.corr = doc["corr"].get<std::string>();
  return m;
}

std::string notification_corr(std::uint64_t round) { return "n" + std::to_string(round); }

std::string directive_corr(std::uint64_t round, std::size_t index) {
  return "d" + std::to_string(round) + "." + std::to_string(index);
}

InterfaceMessage make_batch(std::uint64_t round, Tick time,
                            std::span<const emulation::SimEvent> events) {
  json list = json::array();
  for (const auto& e : events) {
    list.push_back(emulation::event_to_json(e));
  }
  InterfaceMessage m;
  m.direction = Direction::Notification;
  m.round = round;
  m.time = time;
  m.kind = "batch";
  m.body = {{"events", list}};
  m.corr = notification_corr(round);
  return m;
}

std::vector<emulation::SimEvent> batch_events(const InterfaceMessage& m) {
  if (m.direction != Direction::Notification || m.kind != "batch") {
    throw ValidationError("kind", "not a notification batch");
  }
  require_keys_exactly(m.body, {"events"}, "body");
  const json& list = m.body.at("events");
  if (!list.is_array()) {
    throw ValidationError("body.events", "expected an array");
  }
  std::vector<emulation::SimEvent> events;
  events.reserve(list.size());
  for (const auto& e : list) {
    events.push_back(emulation::event_from_json(e));
  }
  return events;
}

InterfaceMessage make_command(std::uint64_t round, Tick time, const std::string& corr,
                              const control::ControlCommand& command) {
  InterfaceMessage m;
  m.direction = Direction::Command;
  m.round = round;
  m.time = time;
  m.kind = std::string(control::to_string(command.kind));
  m.body = control::command_body(command);
  m.corr = corr;
  return m;
}

control::ControlCommand command_of(const InterfaceMessage& m) {
  auto kind = control::parse_command_kind(m.kind);
  if (m.direction != Direction::Command || !kind) {
    throw ValidationError("kind", "not a control command: " + m.kind);
  }
  return control::command_from_body(*kind, m.body);
}

InterfaceMessage make_directive(std::uint64_t round, Tick time, const std::string& corr,
                                const control::ControlDirective& directive) {
  InterfaceMessage m;
  m.direction = Direction::Directive;
  m.round = round;
  m.time = time;
  m.kind = std::string(control::to_string(directive.kind));
  m.body = control::directive_body(directive);
  m.corr = corr;
  return m;
}

control::ControlDirective directive_of(const InterfaceMessage& m) {
  auto kind = control::parse_directive_kind(m.kind);
  if (m.direction != Direction::Directive || !kind) {
    throw ValidationError("kind", "not a directive: " + m.kind);
  }
  return control::directive_from_body(*kind, m.body);
}

InterfaceMessage make_ack(std::uint64_t round, Tick time, const std::string& corr,
                          const control::DirectiveAck& ack) {
  InterfaceMessage m;
  m.direction = Direction::Command;
  m.round = round;
  m.time = time;
  m.kind = "ack";
  m.body = {{"ok", ack.ok}};
  if (!ack.error.empty()) {
    m.body["error"] = ack.error;
  }
  m.corr = corr;
  return m;
}

control::DirectiveAck ack_of(const InterfaceMessage& m) {
  if (m.direction != Direction::Command || m.kind != "ack") {
    throw ValidationError("kind", "not an ack");
  }
  reject_unknown_keys(m.body, {"ok", "error"}, "body");
  const json& ok = require(m.body, "ok", "body");
  if (!ok.is_boolean()) {
    throw ValidationError("body.ok", "expected a boolean");
  }
  control::DirectiveAck ack;
  ack.ok = ok.get<bool>();
  if (m.body.contains("error")) {
    ack.error = require_string(m.body, "error", "body");
  }
  return ack;
}

InterfaceMessage make_session(std::string kind, std::uint64_t round, Tick time, json body) {
  InterfaceMessage m;
  m.direction = Direction::Session;
  m.round = round;
  m.time = time;
  m.kind = std::move(kind);
  m.body = std::move(body);
  m.corr = m.kind;
  return m;
}

InterfaceMessage make_tap(std::uint64_t round, const std::string& corr, const TaggedRecord& r) {
  if (!is_kpi_tap(r.tag)) {
    throw ValidationError("tag", std::string(to_string(r.tag)) + " is not a KPI tap");
  }
  InterfaceMessage m;
  m.direction = Direction::Tap;
  m.round = round;
  m.time = r.time;
  m.kind = std::string(to_string(r.tag));
  m.corr = corr;
  if (const auto* e = std::get_if<emulation::SimEvent>(&r.payload)) {
    m.body = {{"event", emulation::event_to_json(*e)}};
  } else if (const auto* p = std::get_if<ControlDataPoint>(&r.payload)) {
    m.body = {{"name", p->name}, {"value", p->value}, {"seq", r.seq}};
    if (!p->subject.empty()) {
      m.body["subject"] = p->subject;
    }
  } else {
    const auto& metric = std::get<Metric>(r.payload);
    m.body = {{"name", metric.name}, {"value", metric.value}, {"seq", r.seq}};
  }
  return m;
}

TaggedRecord tap_record(const InterfaceMessage& m) {
  auto tag = parse_stream_tag(m.kind);
  if (m.direction != Direction::Tap || !tag || !is_kpi_tap(*tag)) {
    throw ValidationError("kind", "not a KPI tap: " + m.kind);
  }
  TaggedRecord r;
  r.tag = *tag;
  r.time = m.time;
  auto number = [&](const char* key) {
    const json& v = require(m.body, key, "body");
    if (!v.is_number()) {
      throw ValidationError(std::string("body.") + key, "expected a number");
    }
    return v.get<double>();
  };
  auto sequence = [&] {
    const auto s = require_int(m.body, "seq", "body");
    if (s < 0) {
      throw ValidationError("body.seq", "negative sequence");
    }
    return static_cast<std::uint64_t>(s);
  };
  switch (*tag) {
  case StreamTag::Flow1: {
    require_keys_exactly(m.body, {"event"}, "body");
    auto e = emulation::event_from_json(m.body.at("event"));
    r.seq = e.seq;
    r.payload = std::move(e);
    break;
  }
  case StreamTag::Flow2: {
    reject_unknown_keys(m.body, {"name", "subject", "value", "seq"}, "body");
    ControlDataPoint p;
    p.name = require_string(m.body, "name", "body");
    p.subject = m.body.contains("subject") ? require_string(m.body, "subject", "body") : "";
    p.value = number("value");
    r.seq = sequence();
    r.payload = std::move(p);
    break;
  }
  default: {
    require_keys_exactly(m.body, {"name", "value", "seq"}, "body");
    r.payload = Metric{require_string(m.body, "name", "body"), number("value")};
    r.seq = sequence();
    break;
  }
  }
  return r;
}

} // namespace hmsbench::il

#pragma once

#include "hmsbench/common/json_io.hpp"
#include "hmsbench/common/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hmsbench::il {

/// Who talks to whom. Session messages carry the handshake and run
/// shutdown.
enum class Direction : std::uint8_t { Notification, Command, Directive, Tap, Session };

std::string_view to_string(Direction direction);
std::optional<Direction> parse_direction(std::string_view name);

/// Data-flow labels of the reference architecture: 1 emulation data to the
/// KPI engine, 2 control data, 3..6 scenario directives, 7 control KPI.
enum class StreamTag : std::uint8_t { Flow1 = 1, Flow2, Flow3, Flow4, Flow5, Flow6, Flow7 };

std::string_view to_string(StreamTag tag);
std::optional<StreamTag> parse_stream_tag(std::string_view name);
/// Only FLOW1, FLOW2 and FLOW7 feed the KPI engine.
constexpr bool is_kpi_tap(StreamTag tag) {
  return tag == StreamTag::Flow1 || tag == StreamTag::Flow2 || tag == StreamTag::Flow7;
}

/// Envelope crossing the Interface Layer.
struct InterfaceMessage {
  std::string version = kProtocolVersion;
  Direction direction = Direction::Session;
  std::uint64_t round = 0;
  Tick time = 0;
  std::string kind;
  json body = json::object();
  std::string corr;

  bool operator==(const InterfaceMessage&) const = default;
};

/// Decode failure; `offset` is the byte position in the line.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Wire prefix of every IL1 line.
inline constexpr std::string_view kWirePrefix = "IL1 ";

/// One canonical line: "IL1 " + JSON with sorted keys, no trailing newline.
std::string encode(const InterfaceMessage& message);

/// Inverse of encode. Accepts an optional trailing '\n'. Rejects unknown
/// payload kinds for the message's direction.
InterfaceMessage decode(std::string_view line);

/// True when `kind` is a known payload kind for `direction`.
bool is_known_kind(Direction direction, std::string_view kind);

} // namespace hmsbench::il

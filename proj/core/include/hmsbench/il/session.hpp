#pragma once

#include "hmsbench/control/types.hpp"
#include "hmsbench/emulation/sim_event.hpp"
#include "hmsbench/il/message.hpp"
#include "hmsbench/il/taps.hpp"
#include "hmsbench/il/transport.hpp"

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmsbench::il {

enum class Role : std::uint8_t { Control, Emulation, ScenarioManager, Kpi };

std::string_view to_string(Role role);
/// Throws SessionError(UnknownRole) for anything but control, emulation,
/// scenario-manager and kpi.
Role parse_role(std::string_view name);

enum class SessionFailure : std::uint8_t {
  UnknownRole,
  VersionMismatch,
  ModelMismatch,
  Timeout,
  ProtocolViolation,
  Malformed,
};

class SessionError : public std::runtime_error {
public:
  SessionError(SessionFailure failure, const std::string& message)
      : std::runtime_error(message), failure_(failure) {}

  SessionFailure failure() const noexcept { return failure_; }

private:
  SessionFailure failure_;
};

struct SessionConfig {
  Role role = Role::Emulation;
  std::string version = kProtocolVersion;
  std::string model_hash;
  /// Run metadata carried in the emulation hello (run id, scenario, seed).
  json run = json::object();
  std::chrono::milliseconds timeout{10'000};
};

InterfaceMessage make_hello(const SessionConfig& config);

/// Checks a peer hello: protocol version first, then model hash.
void check_hello(const SessionConfig& local, const InterfaceMessage& remote);

/// Verbatim record of every wire line of one run, in total order.
class SessionLog {
public:
  void append(std::string_view line);
  const std::string& text() const { return text_; }
  /// Only the control-to-emulation command lines (commands, acks, end of
  /// round tokens).
  std::string command_log() const;

private:
  std::string text_;
};

/// Extracts the command lines from a full session log text.
std::string command_lines(std::string_view log_text);

struct RoundReply {
  std::vector<control::ControlCommand> commands;
  std::vector<control::DirectiveAck> acks;
  std::vector<TaggedRecord> taps;
};

/// Initiating end of an IL session. The emulation role drives the
/// lock-step round protocol: nothing of a later sim-time is sent before the
/// end-of-round token of the current round has arrived.
class Session {
public:
  /// Sends our hello and validates the peer's. `log` may be null.
  static Session open(Transport& transport, SessionConfig config, SessionLog* log);

  /// One lock-step round: directives, then the notification batch, then
  /// blocks for the control's reply up to and including end-of-round.
  RoundReply exchange_round(Tick time, std::span<const emulation::SimEvent> batch,
                            std::span<const control::ControlDirective> directives);

  /// Requests end of run; returns the taps the peer sends before "bye".
  std::vector<TaggedRecord> finish(Tick time);

  std::uint64_t round() const { return round_; }
  const SessionConfig& config() const { return config_; }
  const InterfaceMessage& peer_hello() const { return peer_hello_; }

private:
  Session(Transport& transport, SessionConfig config, SessionLog* log)
      : transport_(&transport), config_(std::move(config)), log_(log) {}

  void send(const InterfaceMessage& message);
  std::string receive_line(bool partial);

  Transport* transport_;
  SessionConfig config_;
  SessionLog* log_;
  InterfaceMessage peer_hello_;
  std::uint64_t round_ = 0;
};

} // namespace hmsbench::il

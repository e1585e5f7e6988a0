#include "hmsbench/il/session.hpp"

#include "hmsbench/il/protocol.hpp"

#include <array>
#include <set>
#include <sstream>

namespace hmsbench::il {

namespace {
constexpr std::array<std::string_view, 4> kRoleNames{"control", "emulation", "scenario-manager",
                                                     "kpi"};
} // namespace

std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }

Role parse_role(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) {
      return static_cast<Role>(i);
    }
  }
  throw SessionError(SessionFailure::UnknownRole, "unknown role '" + std::string(name) + "'");
}

InterfaceMessage make_hello(const SessionConfig& config) {
  json body = {{"role", std::string(to_string(config.role))}, {"model", config.model_hash}};
  if (!config.run.empty()) {
    body["run"] = config.run;
  }
  InterfaceMessage m = make_session("hello", 0, 0, std::move(body));
  m.version = config.version;
  return m;
}

void check_hello(const SessionConfig& local, const InterfaceMessage& remote) {
  if (remote.direction != Direction::Session || remote.kind != "hello") {
    throw SessionError(SessionFailure::ProtocolViolation, "protocol violation: expected hello");
  }
  if (remote.version != local.version) {
    throw SessionError(SessionFailure::VersionMismatch, "version mismatch: local " +
                                                            local.version + ", remote " +
                                                            remote.version);
  }
  if (!remote.body.contains("role") || !remote.body["role"].is_string()) {
    throw SessionError(SessionFailure::ProtocolViolation, "protocol violation: hello without role");
  }
  parse_role(remote.body["role"].get<std::string>());
  const std::string remote_hash =
      remote.body.contains("model") && remote.body["model"].is_string()
          ? remote.body["model"].get<std::string>()
          : std::string{};
  if (remote_hash != local.model_hash) {
    throw SessionError(SessionFailure::ModelMismatch, "model mismatch: local " + local.model_hash +
                                                          ", remote " + remote_hash);
  }
}

void SessionLog::append(std::string_view line) {
  text_.append(line);
  text_.push_back('\n');
}

std::string command_lines(std::string_view log_text) {
  static const std::string kMarker = "\"role\":\"command\"";
  std::string out;
  std::size_t start = 0;
  while (start < log_text.size()) {
    std::size_t end = log_text.find('\n', start);
    if (end == std::string_view::npos) {
      end = log_text.size();
    }
    const std::string_view line = log_text.substr(start, end - start);
    // Decoding keeps this exact even if a body happens to contain the marker.
    if (line.find(kMarker) != std::string_view::npos &&
        decode(line).direction == Direction::Command) {
      out.append(line);
      out.push_back('\n');
    }
    start = end + 1;
  }
  return out;
}

std::string SessionLog::command_log() const { return command_lines(text_); }

Session Session::open(Transport& transport, SessionConfig config, SessionLog* log) {
  Session session(transport, std::move(config), log);
  session.send(make_hello(session.config_));
  const std::string line = session.receive_line(false);
  try {
    session.peer_hello_ = decode(line);
  } catch (const ParseError& e) {
    throw SessionError(SessionFailure::Malformed, std::string("malformed hello: ") + e.what());
  }
  check_hello(session.config_, session.peer_hello_);
  return session;
}

void Session::send(const InterfaceMessage& message) {
  const std::string line = encode(message);
  if (log_) {
    log_->append(line);
  }
  transport_->send(line);
}

std::string Session::receive_line(bool partial) {
  auto line = transport_->receive(config_.timeout);
  if (!line) {
    if (partial) {
      throw SessionError(SessionFailure::ProtocolViolation,
                         "protocol violation: round " + std::to_string(round_) +
                             " ended without end-of-round");
    }
    throw SessionError(SessionFailure::Timeout,
                       "timeout waiting for peer in round " + std::to_string(round_));
  }
  if (log_) {
    log_->append(*line);
  }
  return *line;
}

RoundReply Session::exchange_round(Tick time, std::span<const emulation::SimEvent> batch,
                                   std::span<const control::ControlDirective> directives) {
  if (config_.role != Role::Emulation) {
    throw SessionError(SessionFailure::ProtocolViolation,
                       "only the emulation role drives rounds");
  }
  ++round_;
  std::set<std::string> open_directives;
  for (std::size_t i = 0; i < directives.size(); ++i) {
    const std::string corr = directive_corr(round_, i);
    open_directives.insert(corr);
    send(make_directive(round_, time, corr, directives[i]));
  }
  send(make_batch(round_, time, batch));
  const std::string notification = notification_corr(round_);

  RoundReply reply;
  bool partial = false;
  for (;;) {
    const std::string line = receive_line(partial);
    partial = true;
    InterfaceMessage m;
    try {
      m = decode(line);
    } catch (const ParseError& e) {
      throw SessionError(SessionFailure::Malformed,
                         "malformed reply in round " + std::to_string(round_) + ": " + e.what());
    }
    if (m.round != round_) {
      throw SessionError(SessionFailure::ProtocolViolation,
                         "protocol violation: reply for round " + std::to_string(m.round) +
                             " during round " + std::to_string(round_));
    }
    try {
      if (m.direction == Direction::Tap) {
        reply.taps.push_back(tap_record(m));
        continue;
      }
      if (m.direction != Direction::Command) {
        throw SessionError(SessionFailure::ProtocolViolation,
                           "protocol violation: unexpected " + std::string(to_string(m.direction)) +
                               " message from control");
      }
      if (m.kind == "ack") {
        if (open_directives.erase(m.corr) == 0) {
          throw SessionError(SessionFailure::ProtocolViolation,
                             "protocol violation: ack for unknown directive " + m.corr);
        }
        reply.acks.push_back(ack_of(m));
        continue;
      }
      if (m.corr != notification) {
        throw SessionError(SessionFailure::ProtocolViolation,
                           "protocol violation: command correlates to " + m.corr + ", expected " +
                               notification);
      }
      control::ControlCommand command = command_of(m);
      if (command.kind == control::CommandKind::EndOfRound) {
        break;
      }
      reply.commands.push_back(std::move(command));
    } catch (const ValidationError& e) {
      throw SessionError(SessionFailure::Malformed,
                         "malformed command in round " + std::to_string(round_) + ": " + e.what());
    }
  }
  if (!open_directives.empty()) {
    throw SessionError(SessionFailure::ProtocolViolation,
                       "protocol violation: directive " + *open_directives.begin() +
                           " not acknowledged");
  }
  return reply;
}

std::vector<TaggedRecord> Session::finish(Tick time) {
  send(make_session("finish", round_, time, json::object()));
  std::vector<TaggedRecord> taps;
  bool partial = false;
  for (;;) {
    const std::string line = receive_line(partial);
    partial = true;
    InterfaceMessage m;
    try {
      m = decode(line);
      if (m.direction == Direction::Tap) {
        taps.push_back(tap_record(m));
        continue;
      }
    } catch (const std::exception& e) {
      throw SessionError(SessionFailure::Malformed, std::string("malformed reply to finish: ") +
                                                        e.what());
    }
    if (m.direction == Direction::Session && m.kind == "bye") {
      break;
    }
    throw SessionError(SessionFailure::ProtocolViolation,
                       "protocol violation: unexpected " + m.kind + " after finish");
  }
  return taps;
}

} // namespace hmsbench::il

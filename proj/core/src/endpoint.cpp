#include "hmsbench/control/endpoint.hpp"

#include "hmsbench/il/protocol.hpp"

namespace hmsbench::control {

using il::Direction;
using il::SessionError;
using il::SessionFailure;

ControlEndpoint::ControlEndpoint(ReferenceControl& control, il::SessionConfig config)
    : control_(&control), config_(std::move(config)) {
  config_.role = il::Role::Control;
}

std::vector<std::string> ControlEndpoint::handle(std::string_view line) {
  il::InterfaceMessage m;
  try {
    m = il::decode(line);
  } catch (const il::ParseError& e) {
    throw SessionError(SessionFailure::Malformed, std::string("malformed line: ") + e.what());
  }

  std::vector<std::string> out;
  if (m.direction == Direction::Session && m.kind == "hello") {
    il::check_hello(config_, m);
    greeted_ = true;
    out.push_back(il::encode(il::make_hello(config_)));
    return out;
  }
  if (!greeted_) {
    throw SessionError(SessionFailure::ProtocolViolation, "protocol violation: expected hello");
  }

  try {
    if (m.direction == Direction::Directive) {
      const DirectiveAck ack = control_->apply_directive(m.time, il::directive_of(m));
      out.push_back(il::encode(il::make_ack(m.round, m.time, m.corr, ack)));
    } else if (m.direction == Direction::Notification) {
      const auto events = il::batch_events(m);
      const auto commands = control_->on_notifications(m.time, events);
      for (const auto& record : control_->take_data_points()) {
        out.push_back(il::encode(il::make_tap(m.round, m.corr, record)));
      }
      for (const auto& command : commands) {
        out.push_back(il::encode(il::make_command(m.round, m.time, m.corr, command)));
      }
    } else if (m.direction == Direction::Session && m.kind == "finish") {
      for (const auto& record : control_->take_data_points()) {
        out.push_back(il::encode(il::make_tap(m.round, m.corr, record)));
      }
      std::uint64_t seq = 1;
      for (const auto& metric : control_->export_control_kpi()) {
        il::TaggedRecord r{il::StreamTag::Flow7, m.time, seq++, metric};
        out.push_back(il::encode(il::make_tap(m.round, m.corr, r)));
      }
      out.push_back(il::encode(il::make_session("bye", m.round, m.time, json::object())));
      finished_ = true;
    } else {
      throw SessionError(SessionFailure::ProtocolViolation,
                         "protocol violation: unexpected " + std::string(to_string(m.direction)) +
                             " " + m.kind + " at control");
    }
  } catch (const ValidationError& e) {
    throw SessionError(SessionFailure::Malformed, std::string("malformed message: ") + e.what());
  }
  return out;
}

bool ControlEndpoint::serve(il::Transport& transport) {
  while (!finished_) {
    auto line = transport.receive(config_.timeout);
    if (!line) {
      return false;
    }
    for (const auto& reply : handle(*line)) {
      transport.send(reply);
    }
  }
  return true;
}

} // namespace hmsbench::control

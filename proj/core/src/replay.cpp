#include "hmsbench/il/replay.hpp"

#include "hmsbench/il/message.hpp"
#include "hmsbench/il/session.hpp"

namespace hmsbench::il {

namespace {

bool is_emulation_side(const InterfaceMessage& m) {
  switch (m.direction) {
  case Direction::Notification:
  case Direction::Directive:
    return true;
  case Direction::Session:
    if (m.kind == "hello") {
      return m.body.value("role", std::string{}) != "control";
    }
    return m.kind == "finish";
  default:
    return false;
  }
}

} // namespace

ReplayTransport::ReplayTransport(std::string_view log_text) {
  if (log_text.empty()) {
    return;
  }
  std::uint64_t last_round = 0;
  std::uint64_t last_batch = 0;
  bool round_open = false;
  bool finished = false;
  bool bye = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < log_text.size()) {
    ++line_no;
    const std::size_t end = log_text.find('\n', start);
    if (end == std::string_view::npos) {
      throw ReplayError("log truncated: line " + std::to_string(line_no) +
                        " has no terminating newline");
    }
    const std::string_view line = log_text.substr(start, end - start);
    start = end + 1;

    InterfaceMessage m;
    try {
      m = decode(line);
    } catch (const ParseError& e) {
      throw ReplayError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (bye) {
      throw ReplayError("line " + std::to_string(line_no) + ": message after bye");
    }
    if (m.round < last_round) {
      throw ReplayError("round monotonicity violated: round " + std::to_string(m.round) +
                        " after round " + std::to_string(last_round) + " at line " +
                        std::to_string(line_no));
    }
    if (round_open && m.round != last_round) {
      throw ReplayError("log truncated in round " + std::to_string(last_round) +
                        ": no end-of-round");
    }
    if (m.direction == Direction::Notification) {
      if (round_open) {
        throw ReplayError("log truncated in round " + std::to_string(last_round) +
                          ": no end-of-round");
      }
      if (rounds_ > 0 && m.round == last_batch) {
        throw ReplayError("round monotonicity violated: round " + std::to_string(m.round) +
                          " repeated at line " + std::to_string(line_no));
      }
      round_open = true;
      last_batch = m.round;
      ++rounds_;
    } else if (m.direction == Direction::Command && m.kind == "end-of-round") {
      if (!round_open || m.round != last_round) {
        throw ReplayError("line " + std::to_string(line_no) +
                          ": end-of-round without an open round");
      }
      round_open = false;
    } else if (m.direction == Direction::Session && m.kind == "finish") {
      if (round_open) {
        throw ReplayError("log truncated in round " + std::to_string(last_round) +
                          ": no end-of-round");
      }
      finished = true;
    } else if (m.direction == Direction::Session && m.kind == "bye") {
      bye = true;
    }
    last_round = m.round;
    if (is_emulation_side(m)) {
      inbound_.emplace_back(line);
    }
  }
  if (round_open) {
    throw ReplayError("log truncated in round " + std::to_string(last_round) +
                      ": no end-of-round");
  }
  if (!finished || !bye) {
    throw ReplayError("log truncated after round " + std::to_string(last_round) +
                      ": session not closed");
  }
}

void ReplayTransport::send(std::string_view line) { sent_.emplace_back(line); }

std::optional<std::string> ReplayTransport::receive(std::chrono::milliseconds) {
  if (inbound_.empty()) {
    return std::nullopt;
  }
  std::string line = std::move(inbound_.front());
  inbound_.pop_front();
  return line;
}

std::string ReplayTransport::command_log() const {
  std::string text;
  for (const auto& line : sent_) {
    text += line;
    text.push_back('\n');
  }
  return command_lines(text);
}

} // namespace hmsbench::il

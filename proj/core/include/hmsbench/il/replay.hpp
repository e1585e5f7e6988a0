#pragma once

#include "hmsbench/il/transport.hpp"

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::il {

class ReplayError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Stands in for the emulation side of a recorded session. The attached
/// control receives the recorded hello, directives, notification batches
/// and finish verbatim; whatever it sends back is collected.
class ReplayTransport final : public Transport {
public:
  /// Validates the log up front. Throws ReplayError on round regressions
  /// ("round monotonicity violated") or a log cut off mid-round. An empty
  /// log gives a session that closes immediately.
  explicit ReplayTransport(std::string_view log_text);

  void send(std::string_view line) override;
  std::optional<std::string> receive(std::chrono::milliseconds timeout) override;

  /// Command lines (role "command") sent by the attached control, each
  /// newline terminated, in the recorded log format.
  std::string command_log() const;
  const std::vector<std::string>& sent() const { return sent_; }
  std::uint64_t rounds() const { return rounds_; }

private:
  std::deque<std::string> inbound_;
  std::vector<std::string> sent_;
  std::uint64_t rounds_ = 0;
};

} // namespace hmsbench::il

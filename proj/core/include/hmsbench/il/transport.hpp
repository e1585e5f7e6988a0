#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmsbench::il {

/// Ordered, reliable FIFO line stream. Lines exclude the trailing newline.
class Transport {
public:
  virtual ~Transport() = default;
  virtual void send(std::string_view line) = 0;
  /// Next line, or nullopt when none arrives within `timeout` or the peer
  /// closed the stream.
  virtual std::optional<std::string> receive(std::chrono::milliseconds timeout) = 0;
};

/// In-process stream to a reactive peer: every sent line is handed to the
/// peer synchronously and its replies queue up for receive().
class LoopbackTransport final : public Transport {
public:
  using Peer = std::function<std::vector<std::string>(std::string_view line)>;

  explicit LoopbackTransport(Peer peer) : peer_(std::move(peer)) {}

  void send(std::string_view line) override;
  std::optional<std::string> receive(std::chrono::milliseconds timeout) override;

private:
  Peer peer_;
  std::deque<std::string> inbox_;
};

/// Line stream over a pair of POSIX file descriptors (pipes, sockets).
/// Does not own the descriptors.
class FdTransport final : public Transport {
public:
  FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void send(std::string_view line) override;
  std::optional<std::string> receive(std::chrono::milliseconds timeout) override;
  bool eof() const { return eof_; }

private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
  bool eof_ = false;
};

} // namespace hmsbench::il

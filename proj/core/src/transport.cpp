#include "hmsbench/il/transport.hpp"

#include <poll.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace hmsbench::il {

void LoopbackTransport::send(std::string_view line) {
  for (auto& reply : peer_(line)) {
    inbox_.push_back(std::move(reply));
  }
}

std::optional<std::string> LoopbackTransport::receive(std::chrono::milliseconds) {
  // A reactive peer answers synchronously; an empty inbox means it never will.
  if (inbox_.empty()) {
    return std::nullopt;
  }
  std::string line = std::move(inbox_.front());
  inbox_.pop_front();
  return line;
}

void FdTransport::send(std::string_view line) {
  std::string framed(line);
  framed.push_back('\n');
  const char* data = framed.data();
  std::size_t left = framed.size();
  while (left > 0) {
    const ssize_t n = ::write(write_fd_, data, left);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw std::runtime_error(std::string("transport write failed: ") + std::strerror(errno));
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdTransport::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      return line;
    }
    if (eof_) {
      return std::nullopt;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      return std::nullopt;
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw std::runtime_error(std::string("transport poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) {
      return std::nullopt;
    }
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) {
        continue;
      }
      throw std::runtime_error(std::string("transport read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      eof_ = true;
      continue;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

} // namespace hmsbench::il

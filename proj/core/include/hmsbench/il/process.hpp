#pragma once

#include "hmsbench/il/transport.hpp"

#include <memory>
#include <string>
#include <sys/types.h>
#include <vector>

namespace hmsbench::il {

/// Line stream to a child process speaking IL1 on its stdin/stdout.
class ProcessTransport final : public Transport {
public:
  /// Spawns `argv` (argv[0] is the executable path). Throws
  /// std::runtime_error when the process cannot be started.
  explicit ProcessTransport(const std::vector<std::string>& argv);
  ~ProcessTransport() override;

  ProcessTransport(const ProcessTransport&) = delete;
  ProcessTransport& operator=(const ProcessTransport&) = delete;

  void send(std::string_view line) override;
  std::optional<std::string> receive(std::chrono::milliseconds timeout) override;

  /// Closes the child's stdin and waits for it; returns its exit status.
  int wait();

private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::unique_ptr<FdTransport> stream_;
  int status_ = -1;
};

} // namespace hmsbench::il

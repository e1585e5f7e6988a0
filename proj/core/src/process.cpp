#include "hmsbench/il/process.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <spawn.h>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace hmsbench::il {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

} // namespace

ProcessTransport::ProcessTransport(const std::vector<std::string>& argv) {
  if (argv.empty()) {
    throw std::runtime_error("empty control command");
  }
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv) {
    args.push_back(const_cast<char*>(a.c_str()));
  }
  args.push_back(nullptr);
  const int rc = posix_spawn(&pid_, argv[0].c_str(), &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    close_fd(to_child_);
    close_fd(from_child_);
    throw std::runtime_error("cannot start " + argv[0] + ": " + std::strerror(rc));
  }
  // A child that dies early must not kill us on the next write.
  std::signal(SIGPIPE, SIG_IGN);
  stream_ = std::make_unique<FdTransport>(from_child_, to_child_);
}

ProcessTransport::~ProcessTransport() {
  if (pid_ > 0 && status_ < 0) {
    close_fd(to_child_);
    int status = 0;
    // The child exits on end of input; give it a moment before forcing it.
    bool exited = false;
    for (int i = 0; i < 100 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) != 0;
      if (!exited) {
        ::usleep(10'000);
      }
    }
    if (!exited) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }
  close_fd(to_child_);
  close_fd(from_child_);
}

void ProcessTransport::send(std::string_view line) { stream_->send(line); }

std::optional<std::string> ProcessTransport::receive(std::chrono::milliseconds timeout) {
  return stream_->receive(timeout);
}

int ProcessTransport::wait() {
  if (status_ >= 0) {
    return status_;
  }
  close_fd(to_child_);
  int status = 0;
  if (::waitpid(pid_, &status, 0) < 0) {
    throw std::runtime_error(std::string("waitpid: ") + std::strerror(errno));
  }
  status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return status_;
}

} // namespace hmsbench::il

#include "generation/line_protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace catchjit::generation {

LineProtocolClient::LineProtocolClient(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

LineProtocolClient::~LineProtocolClient() { stop(); }

void LineProtocolClient::start() {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw BackendUnavailable("pipe: " + std::string(std::strerror(errno)));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendUnavailable("pipe: " + std::string(std::strerror(errno)));
  }
  pid_t pid = fork();
  if (pid < 0) throw BackendUnavailable("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  signal(SIGPIPE, SIG_IGN);
}

void LineProtocolClient::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == 0) {
      kill(-pid_, SIGTERM);
      waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
}

std::string LineProtocolClient::read_line() {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw BackendUnavailable("timeout waiting for backend response");
    pollfd pfd{from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BackendUnavailable("poll: " + std::string(std::strerror(errno)));
    }
    if (r == 0) throw BackendUnavailable("timeout waiting for backend response");
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) throw BackendUnavailable("backend closed its output");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

nlohmann::json LineProtocolClient::request(const nlohmann::json& message) {
  std::lock_guard lock(mutex_);
  if (failed_) throw BackendUnavailable("backend '" + command_ + "' is unavailable");
  try {
    if (pid_ < 0) start();
    std::string line = message.dump() + "\n";
    size_t off = 0;
    while (off < line.size()) {
      ssize_t n = write(to_child_, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BackendUnavailable("write to backend failed");
      }
      off += static_cast<size_t>(n);
    }
    std::string reply = read_line();
    try {
      auto parsed = nlohmann::json::parse(reply);
      if (!parsed.is_object()) throw BackendUnavailable("backend response is not an object");
      if (parsed.contains("error")) throw BackendUnavailable("backend error: " + parsed["error"].dump());
      return parsed;
    } catch (const nlohmann::json::exception& e) {
      throw BackendUnavailable(std::string("malformed backend response: ") + e.what());
    }
  } catch (const BackendUnavailable&) {
    failed_ = true;
    stop();
    throw;
  }
}

}  // namespace catchjit::generation

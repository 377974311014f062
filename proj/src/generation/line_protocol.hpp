#pragma once

#include <mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace catchjit::generation {

class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON-lines client over a child process's stdin/stdout. The process is
// started lazily with `/bin/sh -c <command>` and kept for later requests.
// Once a request fails the client stays unavailable.
class LineProtocolClient {
 public:
  LineProtocolClient(std::string command, int timeout_ms);
  ~LineProtocolClient();
  LineProtocolClient(const LineProtocolClient&) = delete;
  LineProtocolClient& operator=(const LineProtocolClient&) = delete;

  // Sends one request line, waits for one response line. Requests are
  // serialized. Throws BackendUnavailable.
  nlohmann::json request(const nlohmann::json& message);

  const std::string& command() const { return command_; }

 private:
  void start();
  void stop();
  std::string read_line();

  std::string command_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool failed_ = false;
  std::string buffer_;
  std::mutex mutex_;
};

}  // namespace catchjit::generation

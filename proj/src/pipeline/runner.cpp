#include "pipeline/runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include "minilang/interpreter.hpp"

namespace catchjit::pipeline {

using minilang::ErrorKind;
using minilang::OutcomeStatus;
using minilang::TestOutcome;
using minilang::TraceEvent;
using minilang::TraceEventKind;
using minilang::Value;
using nlohmann::ordered_json;

CommandResult run_command(const std::string& command, int timeout_ms) {
  int out_pipe[2];
  if (pipe(out_pipe) != 0) throw std::runtime_error("pipe: " + std::string(std::strerror(errno)));
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  CommandResult result;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) {
      result.timed_out = r == 0;
      break;
    }
    char chunk[4096];
    ssize_t n = read(out_pipe[0], chunk, sizeof chunk);
    if (n <= 0) break;
    result.output.append(chunk, static_cast<size_t>(n));
  }
  close(out_pipe[0]);
  if (result.timed_out) kill(-pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  return result;
}

Value value_from_json(const ordered_json& j) {
  if (j.is_null()) return Value();
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_array()) {
    minilang::List l;
    for (const auto& e : j) l.push_back(value_from_json(e));
    return Value(std::move(l));
  }
  if (j.is_object()) {
    minilang::Map m;
    for (const auto& [k, v] : j.items()) m.set(k, value_from_json(v));
    return Value(std::move(m));
  }
  throw std::invalid_argument("unsupported value " + j.dump());
}

ordered_json value_to_json(const Value& v) {
  switch (v.kind()) {
    case minilang::ValueKind::Null: return nullptr;
    case minilang::ValueKind::Int: return v.as_int();
    case minilang::ValueKind::Bool: return v.as_bool();
    case minilang::ValueKind::Text: return v.as_text();
    case minilang::ValueKind::List: {
      auto out = ordered_json::array();
      for (const auto& e : v.as_list()) out.push_back(value_to_json(e));
      return out;
    }
    case minilang::ValueKind::Map: {
      auto out = ordered_json::object();
      const auto& m = v.as_map();
      for (size_t i = 0; i < m.keys.size(); ++i) out[m.keys[i]] = value_to_json(m.values[i]);
      return out;
    }
  }
  return nullptr;
}

namespace {

TraceEvent runner_event(const std::string& name, const std::string& message) {
  TraceEvent e;
  e.kind = TraceEventKind::Runner;
  e.name = name;
  e.message = message;
  return e;
}

std::string str(const ordered_json& j, const char* key) {
  if (!j.contains(key)) return "";
  if (!j[key].is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

}  // namespace

TestOutcome parse_runner_stream(const CommandResult& result) {
  TestOutcome out;
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < result.output.size()) {
    size_t nl = result.output.find('\n', start);
    if (nl == std::string::npos) nl = result.output.size();
    std::string line = result.output.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  bool handshake = false;
  if (!lines.empty()) {
    try {
      auto h = ordered_json::parse(lines.front());
      handshake = h.is_object() && h.value("protocol", std::string()) == kRunnerProtocol;
    } catch (const ordered_json::parse_error&) {
    }
  }
  if (!handshake) {
    if (result.exit_code != 0 || result.timed_out) {
      out.status = OutcomeStatus::Error;
      out.error_kind = ErrorKind::Exception;
      out.trace.events.push_back(runner_event(
          result.timed_out ? "timeout" : "runner_crash",
          result.timed_out ? "runner timed out" : "exit status " + std::to_string(result.exit_code)));
      out.detail = "no protocol output";
    } else {
      out.status = OutcomeStatus::Error;
      out.error_kind = ErrorKind::ParseFailure;
      out.detail = "missing handshake";
    }
    return out;
  }
  std::string declared;
  int depth = 0;
  try {
    for (size_t i = 1; i < lines.size(); ++i) {
      auto j = ordered_json::parse(lines[i]);
      if (!j.is_object()) throw std::invalid_argument("event line is not an object");
      auto ev = str(j, "event");
      TraceEvent e;
      if (ev == "call") {
        e.kind = TraceEventKind::Call;
        e.depth = depth++;
        e.name = str(j, "name");
        if (j.contains("args")) {
          for (const auto& a : j["args"]) e.args.push_back(value_from_json(a));
        }
      } else if (ev == "return") {
        e.kind = TraceEventKind::Return;
        e.name = str(j, "name");
        e.depth = depth > 0 ? --depth : 0;
        if (j.contains("value")) e.value = value_from_json(j["value"]);
      } else if (ev == "exception") {
        e.kind = TraceEventKind::Exception;
        e.depth = depth;
        e.exception_kind = str(j, "kind");
        e.message = str(j, "message");
        e.function = str(j, "function");
        e.caught = j.value("caught", false);
      } else if (ev == "assert_fail") {
        e.kind = TraceEventKind::AssertFail;
        e.depth = depth;
        e.expression_text = str(j, "expression");
        if (j.contains("expected")) e.expected = value_from_json(j["expected"]);
        if (j.contains("actual")) e.actual = value_from_json(j["actual"]);
      } else if (ev == "runner") {
        e = runner_event(str(j, "kind"), str(j, "message"));
      } else if (ev == "result") {
        declared = str(j, "status");
        if (declared != "pass" && declared != "fail" && declared != "error") {
          throw std::invalid_argument("result status must be pass, fail or error");
        }
        continue;
      } else {
        throw std::invalid_argument("unknown event '" + ev + "'");
      }
      out.trace.events.push_back(std::move(e));
    }
  } catch (const std::exception& ex) {
    out = TestOutcome{};
    out.status = OutcomeStatus::Error;
    out.error_kind = ErrorKind::ParseFailure;
    out.detail = ex.what();
    return out;
  }
  if (result.timed_out) out.trace.events.push_back(runner_event("timeout", "runner timed out"));
  const auto* terminal = out.trace.terminal();
  if (declared == "pass" && !result.timed_out) {
    out.status = OutcomeStatus::Pass;
  } else if (declared == "fail" || (declared.empty() && terminal && terminal->kind == TraceEventKind::AssertFail)) {
    out.status = OutcomeStatus::Fail;
  } else if (!declared.empty() || terminal || result.exit_code != 0 || result.timed_out) {
    out.status = OutcomeStatus::Error;
    out.error_kind = ErrorKind::Exception;
    if (!terminal) {
      out.trace.events.push_back(runner_event("runner_crash", "exit status " + std::to_string(result.exit_code)));
    }
  }
  return out;
}

std::pair<TestOutcome, TestOutcome> external_runner_adapter(const std::string& parent_cmd,
                                                            const std::string& child_cmd, int timeout_ms) {
  return {parse_runner_stream(run_command(parent_cmd, timeout_ms)),
          parse_runner_stream(run_command(child_cmd, timeout_ms))};
}

}  // namespace catchjit::pipeline

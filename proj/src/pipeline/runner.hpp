#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "minilang/trace.hpp"
#include "minilang/value.hpp"

namespace catchjit::pipeline {

inline constexpr const char* kRunnerProtocol = "catchjit-runner/1";

// Runner-level event names. Anything else is kept but matches no rule.
inline constexpr const char* kRunnerEvents[] = {
    "runner_crash",         "mock_failure",     "data_provider_failure", "reflection_use",
    "visibility_violation", "server_unreachable", "timeout",             "retry_passed",
};

struct CommandResult {
  int exit_code = 0;
  bool timed_out = false;
  std::string output;
};

// Runs `/bin/sh -c command` with stdin closed and captures stdout.
CommandResult run_command(const std::string& command, int timeout_ms);

// Protocol stream to an outcome. Without a handshake a nonzero exit becomes
// a runner_crash event; any malformed line is a ParseFailure.
minilang::TestOutcome parse_runner_stream(const CommandResult& result);

std::pair<minilang::TestOutcome, minilang::TestOutcome> external_runner_adapter(const std::string& parent_cmd,
                                                                                const std::string& child_cmd,
                                                                                int timeout_ms);

minilang::Value value_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json value_to_json(const minilang::Value& v);

}  // namespace catchjit::pipeline

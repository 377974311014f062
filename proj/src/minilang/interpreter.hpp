#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minilang/ast.hpp"
#include "minilang/trace.hpp"
#include "minilang/value.hpp"

namespace catchjit::minilang {

inline constexpr std::int64_t kDefaultStepLimit = 100000;
inline constexpr int kMaxCallDepth = 200;

using ArgTuple = std::vector<Value>;

// Runs every statement of `test_source` against the functions of `programs`.
// Interpreter state lives only for the duration of the call.
TestOutcome execute(const ProgramSet& programs, std::string_view test_source,
                    std::int64_t step_limit = kDefaultStepLimit);
TestOutcome execute(const Program& program, const TestCase& test,
                    std::int64_t step_limit = kDefaultStepLimit);
TestOutcome execute(const ProgramSet& programs, const TestCase& test,
                    std::int64_t step_limit = kDefaultStepLimit);

struct Observation {
  ArgTuple args;
  std::optional<Value> value;           // normal return
  std::optional<std::string> exception;  // exception kind
  std::string message;
  bool step_limit = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Calls `entry` once per input tuple. Failures are recorded, not thrown.
// Throws std::invalid_argument when `entry` is not defined.
std::vector<Observation> observed_outputs(const ProgramSet& programs, const std::string& entry,
                                          const std::vector<ArgTuple>& inputs,
                                          std::int64_t step_limit = kDefaultStepLimit);
std::vector<Observation> observed_outputs(const Program& program, const std::string& entry,
                                          const std::vector<ArgTuple>& inputs,
                                          std::int64_t step_limit = kDefaultStepLimit);

ProgramSet single_file(const Program& program, const std::string& file = "main.ml0");

}  // namespace catchjit::minilang

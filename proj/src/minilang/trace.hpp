#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minilang/ast.hpp"
#include "minilang/value.hpp"

namespace catchjit {

enum class WorkflowTag { CoincidentalCatch, HardenNoCoverage, HardenMutationGuided, DodgyDiff, IntentAware };

std::string_view to_string(WorkflowTag tag);
std::optional<WorkflowTag> parse_workflow_tag(std::string_view text);

}  // namespace catchjit

namespace catchjit::minilang {

enum class TraceEventKind {
  Call,
  Return,
  Exception,
  AssertFail,
  StepLimitExceeded,
  // Runner-level events, produced only by external test runners.
  Runner,
};

struct TraceEvent {
  TraceEventKind kind = TraceEventKind::Call;
  int depth = 0;
  std::string name;         // Call/Return: function. Runner: event kind.
  std::vector<Value> args;  // Call
  Value value;              // Return
  std::string exception_kind;
  std::string message;      // Exception / Runner
  NodeId node_id = 0;
  std::string function;     // Exception: function active when raised
  bool caught = false;      // Exception consumed by catch_kind
  Value expected;           // AssertFail
  Value actual;
  std::string expression_text;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ExecutionTrace {
  std::vector<TraceEvent> events;

  // Last uncaught Exception, AssertFail, StepLimitExceeded or Runner event.
  const TraceEvent* terminal() const;

  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

// Stack replay: Returns match the innermost open Call, caught exceptions
// unwind to their recorded depth, nothing follows a terminal event.
bool well_formed(const ExecutionTrace& trace);

// One line per event; rule evidence spans quote these lines.
std::string render_event(const TraceEvent& event);
std::string render_trace(const ExecutionTrace& trace);

enum class OutcomeStatus { Pass, Fail, Error };
enum class ErrorKind { None, Exception, StepLimit, ParseFailure };

std::string_view to_string(OutcomeStatus status);
std::string_view to_string(ErrorKind kind);

struct TestOutcome {
  OutcomeStatus status = OutcomeStatus::Pass;
  ErrorKind error_kind = ErrorKind::None;
  ExecutionTrace trace;
  std::int64_t steps_used = 0;
  std::string detail;  // parse error text or runner notes

  bool passed() const { return status == OutcomeStatus::Pass; }
  // Status label used by reports: Pass, Fail, Error(Exception), ...
  std::string label() const;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct Provenance {
  WorkflowTag workflow = WorkflowTag::HardenNoCoverage;
  std::optional<std::string> mutant_id;
  std::optional<std::string> risk_id;
};

struct TestCase {
  std::string id;
  std::string source;
  Provenance provenance;
  std::string entry;  // entry function the assertions target, when known
};

}  // namespace catchjit::minilang

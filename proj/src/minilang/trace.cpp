#include "minilang/trace.hpp"

namespace catchjit {

std::string_view to_string(WorkflowTag tag) {
  switch (tag) {
    case WorkflowTag::CoincidentalCatch: return "CoincidentalCatch";
    case WorkflowTag::HardenNoCoverage: return "HardenNoCoverage";
    case WorkflowTag::HardenMutationGuided: return "HardenMutationGuided";
    case WorkflowTag::DodgyDiff: return "DodgyDiff";
    case WorkflowTag::IntentAware: return "IntentAware";
  }
  return "?";
}

std::optional<WorkflowTag> parse_workflow_tag(std::string_view text) {
  for (auto tag : {WorkflowTag::CoincidentalCatch, WorkflowTag::HardenNoCoverage,
                   WorkflowTag::HardenMutationGuided, WorkflowTag::DodgyDiff,
                   WorkflowTag::IntentAware}) {
    if (to_string(tag) == text) return tag;
  }
  return std::nullopt;
}

}  // namespace catchjit

namespace catchjit::minilang {

const TraceEvent* ExecutionTrace::terminal() const {
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    switch (it->kind) {
      case TraceEventKind::Exception:
        if (!it->caught) return &*it;
        break;
      case TraceEventKind::AssertFail:
      case TraceEventKind::StepLimitExceeded:
      case TraceEventKind::Runner:
        return &*it;
      default:
        break;
    }
  }
  return nullptr;
}

bool well_formed(const ExecutionTrace& trace) {
  std::vector<std::string> stack;
  bool terminated = false;
  for (const auto& e : trace.events) {
    if (terminated) {
      // Runner events may trail a terminal event in external logs.
      if (e.kind != TraceEventKind::Runner) return false;
      continue;
    }
    switch (e.kind) {
      case TraceEventKind::Call:
        if (e.depth != static_cast<int>(stack.size())) return false;
        stack.push_back(e.name);
        break;
      case TraceEventKind::Return:
        if (stack.empty() || stack.back() != e.name) return false;
        stack.pop_back();
        if (e.depth != static_cast<int>(stack.size())) return false;
        break;
      case TraceEventKind::Exception:
        if (e.caught) {
          if (e.depth > static_cast<int>(stack.size())) return false;
          stack.resize(static_cast<size_t>(e.depth));
        } else {
          terminated = true;
        }
        break;
      case TraceEventKind::AssertFail:
      case TraceEventKind::StepLimitExceeded:
        terminated = true;
        break;
      case TraceEventKind::Runner:
        break;
    }
  }
  return true;
}

namespace {

std::string render_args(const std::vector<Value>& args) {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_literal(args[i]);
  }
  return out;
}

}  // namespace

std::string render_event(const TraceEvent& e) {
  switch (e.kind) {
    case TraceEventKind::Call: return "call " + e.name + "(" + render_args(e.args) + ")";
    case TraceEventKind::Return: return "return " + e.name + " -> " + to_literal(e.value);
    case TraceEventKind::Exception:
      return std::string(e.caught ? "caught " : "") + "exception " + e.exception_kind + ": " +
             e.message + " [node " + std::to_string(e.node_id) + " in " + e.function + "]";
    case TraceEventKind::AssertFail:
      return "assert_fail " + e.expression_text + ": expected " + to_literal(e.expected) +
             ", actual " + to_literal(e.actual);
    case TraceEventKind::StepLimitExceeded: return "step_limit_exceeded";
    case TraceEventKind::Runner: return "runner " + e.name + ": " + e.message;
  }
  return "";
}

std::string render_trace(const ExecutionTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    out += render_event(e);
    out += '\n';
  }
  return out;
}

std::string_view to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::Pass: return "Pass";
    case OutcomeStatus::Fail: return "Fail";
    case OutcomeStatus::Error: return "Error";
  }
  return "?";
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::None: return "None";
    case ErrorKind::Exception: return "Exception";
    case ErrorKind::StepLimit: return "StepLimit";
    case ErrorKind::ParseFailure: return "ParseFailure";
  }
  return "?";
}

std::string TestOutcome::label() const {
  if (status != OutcomeStatus::Error) return std::string(to_string(status));
  return "Error(" + std::string(to_string(error_kind)) + ")";
}

}  // namespace catchjit::minilang

// Fake external runner, generator backend and judge for tests.
//   catchjit_fixture runner <scenario>
//   catchjit_fixture backend <ok|dead|error>
//   catchjit_fixture judge <yes|no|dead>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <json.hpp>

namespace {

using nlohmann::ordered_json;

void emit(const ordered_json& j) { std::cout << j.dump() << "\n"; }

void handshake() { emit({{"protocol", "catchjit-runner/1"}}); }

void call(const std::string& name) { emit({{"event", "call"}, {"name", name}, {"args", ordered_json::array({3})}}); }

void runner_line(const std::string& kind, const std::string& message) {
  emit({{"event", "runner"}, {"kind", kind}, {"message", message}});
}

void result(const std::string& status) { emit({{"event", "result"}, {"status", status}}); }

int runner(const std::string& scenario) {
  static const std::map<std::string, std::pair<std::string, std::string>> runner_events = {
      {"server_unreachable", {"server_unreachable", "connection refused: localhost:8080"}},
      {"mock_unexpected", {"mock_failure", "unexpected call to fetch_user(7)"}},
      {"mock_setup", {"mock_failure", "mock setup failed: cannot construct UserService"}},
      {"data_provider", {"data_provider_failure", "provider rows() raised IOError"}},
      {"reflection", {"reflection_use", "field access through reflection denied"}},
      {"private", {"visibility_violation", "cannot call private method Account.reset()"}},
      {"protected", {"visibility_violation", "method Account.audit() must be protected"}},
      {"retry_passed", {"retry_passed", "failed once, passed on retry"}},
  };
  if (scenario == "crash") {
    std::cerr << "Segmentation fault\n";
    return 139;
  }
  if (scenario == "silent_ok") return 0;
  if (scenario == "garbage") {
    handshake();
    std::cout << "not json\n";
    return 0;
  }
  if (scenario == "hang") {
    handshake();
    std::cout.flush();
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  handshake();
  call("is_ok");
  if (scenario == "pass") {
    emit({{"event", "return"}, {"name", "is_ok"}, {"value", true}});
    result("pass");
  } else if (scenario == "fail") {
    emit({{"event", "return"}, {"name", "is_ok"}, {"value", false}});
    emit({{"event", "assert_fail"}, {"expression", "assert_eq(is_ok(3), true)"}, {"expected", true}, {"actual", false}});
    result("fail");
  } else if (scenario == "map_reordered") {
    emit({{"event", "assert_fail"},
          {"expression", "assert_eq(config(), {\"a\": 1, \"b\": 2})"},
          {"expected", {{"a", 1}, {"b", 2}}},
          {"actual", {{"b", 2}, {"a", 1}}}});
    result("fail");
  } else if (scenario == "not_implemented" || scenario == "type_mismatch") {
    emit({{"event", "exception"},
          {"kind", scenario},
          {"message", scenario == "type_mismatch" ? "expected int, got str" : "is_ok is not implemented"},
          {"function", "is_ok"}});
    result("error");
  } else if (auto it = runner_events.find(scenario); it != runner_events.end()) {
    runner_line(it->second.first, it->second.second);
    result("error");
  } else {
    std::cerr << "unknown scenario " << scenario << "\n";
    return 64;
  }
  return 0;
}

int backend(const std::string& mode) {
  if (mode == "dead") return 1;
  std::string line;
  while (std::getline(std::cin, line)) {
    auto req = ordered_json::parse(line);
    auto kind = req.value("kind", std::string());
    ordered_json reply = {{"id", req.value("id", 0)}};
    if (mode == "error") {
      reply["error"] = "fixture backend refuses";
    } else if (kind == "generate") {
      reply["tests"] = ordered_json::array();
      for (const auto& e : req["context"]["entry_points"]) {
        reply["tests"].push_back("assert_eq(" + e.get<std::string>() + "(0), " + e.get<std::string>() + "(0));");
      }
    } else if (kind == "infer_intent") {
      reply["intent"] = "Refactor " + req["case"].value("title", std::string("the change"));
    } else if (kind == "enumerate_risks") {
      reply["risks"] = ordered_json::array();
    } else {
      reply["error"] = "unknown kind";
    }
    emit(reply);
    std::cout.flush();
  }
  return 0;
}

int judge(const std::string& mode) {
  if (mode == "dead") return 1;
  std::string line;
  while (std::getline(std::cin, line)) {
    auto req = ordered_json::parse(line);
    auto kind = req.value("kind", std::string());
    ordered_json reply = {{"id", req.value("id", 0)}};
    if (kind == "judge_binary") {
      reply["answer"] = mode == "yes" ? "Yes" : "No";
      reply["p"] = 0.9;
    } else {
      reply["category"] = mode == "yes" ? "High" : "Low";
      reply["rationale"] = "fixture judge says " + mode;
    }
    emit(reply);
    std::cout.flush();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: catchjit_fixture runner|backend|judge <mode>\n";
    return 64;
  }
  std::string role = argv[1], mode = argv[2];
  if (role == "runner") return runner(mode);
  if (role == "backend") return backend(mode);
  if (role == "judge") return judge(mode);
  return 64;
}

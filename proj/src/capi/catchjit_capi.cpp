#include "catchjit/catchjit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "pipeline/pipeline.hpp"

struct catchjit_config {
  catchjit::pipeline::RunConfig config;
};

struct catchjit_report {
  nlohmann::json report;
};

namespace {

using namespace catchjit::pipeline;

thread_local std::string g_last_error;

catchjit_status fail(catchjit_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

catchjit_status put(char** out, const std::string& s) {
  *out = copy_string(s);
  return *out ? CATCHJIT_OK : fail(CATCHJIT_ERR_INTERNAL, "out of memory");
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

template <typename F>
catchjit_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const ConfigError& e) {
    return fail(CATCHJIT_ERR_CONFIG, e.what());
  } catch (const CorpusError& e) {
    return fail(CATCHJIT_ERR_CORPUS, e.what());
  } catch (const BackendFailure& e) {
    return fail(CATCHJIT_ERR_BACKEND, e.what());
  } catch (const ReportError& e) {
    return fail(CATCHJIT_ERR_REPORT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CATCHJIT_ERR_REPORT, e.what());
  } catch (const std::exception& e) {
    return fail(CATCHJIT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CATCHJIT_ERR_INTERNAL, "unknown error");
  }
}

#define CATCHJIT_REQUIRE(cond)                                                       \
  do {                                                                               \
    if (!(cond)) return fail(CATCHJIT_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* catchjit_last_error(void) { return g_last_error.c_str(); }

const char* catchjit_version(void) { return "1.0.0"; }

const char* catchjit_status_name(catchjit_status status) {
  switch (status) {
    case CATCHJIT_OK: return "ok";
    case CATCHJIT_ERR_CONFIG: return "config error";
    case CATCHJIT_ERR_CORPUS: return "corpus error";
    case CATCHJIT_ERR_BACKEND: return "backend failure";
    case CATCHJIT_ERR_REPORT: return "report error";
    case CATCHJIT_ERR_NOT_FOUND: return "not found";
    case CATCHJIT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CATCHJIT_ERR_IO: return "i/o error";
    case CATCHJIT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void catchjit_string_free(char* text) { std::free(text); }

catchjit_status catchjit_config_load(const char* path, catchjit_config** out) {
  CATCHJIT_REQUIRE(path && out);
  return guarded([&] {
    *out = new catchjit_config{load_config(path)};
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_config_parse(const char* json_text, catchjit_config** out) {
  CATCHJIT_REQUIRE(json_text && out);
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(e.what());
    }
    *out = new catchjit_config{parse_config(j)};
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_config_set_corpus(catchjit_config* config, const char* path) {
  CATCHJIT_REQUIRE(config && path);
  config->config.corpus = path;
  return CATCHJIT_OK;
}

catchjit_status catchjit_config_apply_environment(catchjit_config* config) {
  CATCHJIT_REQUIRE(config);
  return guarded([&] {
    apply_environment(config->config);
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_config_to_json(const catchjit_config* config, char** out) {
  CATCHJIT_REQUIRE(config && out);
  return guarded([&] { return put(out, config_to_json(config->config).dump(2)); });
}

void catchjit_config_free(catchjit_config* config) { delete config; }

catchjit_status catchjit_run(const catchjit_config* config, catchjit_report** out) {
  CATCHJIT_REQUIRE(config && out);
  return guarded([&] {
    *out = new catchjit_report{run_pipeline(config->config)};
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_report_load(const char* path, catchjit_report** out) {
  CATCHJIT_REQUIRE(path && out);
  return guarded([&] {
    *out = new catchjit_report{read_report(path)};
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_report_write(const catchjit_report* report, const char* path) {
  CATCHJIT_REQUIRE(report && path);
  return guarded([&] {
    try {
      write_report(report->report, path);
    } catch (const std::runtime_error& e) {
      return fail(CATCHJIT_ERR_IO, e.what());
    }
    return CATCHJIT_OK;
  });
}

catchjit_status catchjit_report_to_json(const catchjit_report* report, char** out) {
  CATCHJIT_REQUIRE(report && out);
  return guarded([&] { return put(out, report->report.dump(2)); });
}

catchjit_status catchjit_report_canonical(const catchjit_report* report, char** out) {
  CATCHJIT_REQUIRE(report && out);
  return guarded([&] { return put(out, canonical_report_text(report->report)); });
}

size_t catchjit_report_assessment_count(const catchjit_report* report) {
  if (!report || !report->report.contains("assessments")) return 0;
  return report->report["assessments"].size();
}

catchjit_status catchjit_report_check(const catchjit_report* report, char** out) {
  CATCHJIT_REQUIRE(report && out);
  return guarded([&] { return put(out, join(check_report(report->report))); });
}

catchjit_status catchjit_report_render_assessment(const catchjit_report* report, const char* id, char** out) {
  CATCHJIT_REQUIRE(report && id && out);
  return guarded([&] {
    bool known = false;
    for (const auto& a : report->report.at("assessments")) known = known || a.at("id") == id;
    if (!known) return fail(CATCHJIT_ERR_NOT_FOUND, std::string("no weak catch with id '") + id + "' in report");
    return put(out, render_assessment(report->report, id));
  });
}

catchjit_status catchjit_report_render_stats(const catchjit_report* report, char** out) {
  CATCHJIT_REQUIRE(report && out);
  return guarded([&] { return put(out, render_stats(report->report)); });
}

void catchjit_report_free(catchjit_report* report) { delete report; }

catchjit_status catchjit_corpus_validate(const char* path, int* cases, char** problems) {
  CATCHJIT_REQUIRE(path && cases && problems);
  return guarded([&] {
    auto v = validate_corpus(path);
    *cases = v.cases;
    return put(problems, join(v.problems));
  });
}

}  // extern "C"

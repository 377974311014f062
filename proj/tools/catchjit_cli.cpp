#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "catchjit/catchjit.h"

namespace {

int exit_code(catchjit_status s) {
  switch (s) {
    case CATCHJIT_OK: return 0;
    case CATCHJIT_ERR_CORPUS: return 2;
    case CATCHJIT_ERR_BACKEND: return 3;
    default: return 1;
  }
}

int report_error(catchjit_status s) {
  std::cerr << "catchjit: " << catchjit_status_name(s) << ": " << catchjit_last_error() << "\n";
  return exit_code(s);
}

std::string take(char* text) {
  std::string out = text ? text : "";
  catchjit_string_free(text);
  return out;
}

int cmd_run(const std::string& corpus, const std::string& config_path, const std::string& out_path) {
  catchjit_config* config = nullptr;
  catchjit_status s = config_path.empty() ? catchjit_config_parse("{}", &config)
                                          : catchjit_config_load(config_path.c_str(), &config);
  if (s != CATCHJIT_OK) return report_error(s);
  if (!corpus.empty()) catchjit_config_set_corpus(config, corpus.c_str());
  s = catchjit_config_apply_environment(config);
  catchjit_report* report = nullptr;
  if (s == CATCHJIT_OK) s = catchjit_run(config, &report);
  catchjit_config_free(config);
  if (s != CATCHJIT_OK) return report_error(s);
  s = catchjit_report_write(report, out_path.c_str());
  size_t n = catchjit_report_assessment_count(report);
  catchjit_report_free(report);
  if (s != CATCHJIT_OK) return report_error(s);
  std::cout << "wrote " << out_path << " (" << n << " weak catches assessed)\n";
  return 0;
}

int with_report(const std::string& path, catchjit_report** report) {
  catchjit_status s = catchjit_report_load(path.c_str(), report);
  return s == CATCHJIT_OK ? 0 : report_error(s);
}

int cmd_assess(const std::string& path, const std::string& id) {
  catchjit_report* report = nullptr;
  if (int rc = with_report(path, &report)) return rc;
  char* text = nullptr;
  catchjit_status s = catchjit_report_render_assessment(report, id.c_str(), &text);
  catchjit_report_free(report);
  if (s != CATCHJIT_OK) return report_error(s);
  std::cout << take(text);
  return 0;
}

int cmd_stats(const std::string& path) {
  catchjit_report* report = nullptr;
  if (int rc = with_report(path, &report)) return rc;
  char* text = nullptr;
  catchjit_status s = catchjit_report_render_stats(report, &text);
  catchjit_report_free(report);
  if (s != CATCHJIT_OK) return report_error(s);
  std::cout << take(text);
  return 0;
}

int cmd_validate(const std::string& path) {
  int cases = 0;
  char* problems = nullptr;
  catchjit_status s = catchjit_corpus_validate(path.c_str(), &cases, &problems);
  if (s != CATCHJIT_OK) return report_error(s);
  std::string text = take(problems);
  std::cout << cases << " cases loaded\n";
  if (!text.empty()) {
    std::cerr << text;
    return 2;
  }
  std::cout << "corpus OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catchjit: just-in-time catching test generation and assessment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(catchjit_version()));

  std::string corpus, config, out, report, id, dir;
  auto* run = app.add_subcommand("run", "Generate, classify and assess tests over a corpus");
  run->add_option("--corpus", corpus, "Corpus directory (overrides the config)");
  run->add_option("--config", config, "Run configuration JSON");
  run->add_option("--out", out, "Report output path")->required();

  auto* assess = app.add_subcommand("assess", "Show the assessment detail for one weak catch");
  assess->add_option("report", report, "Report path")->required();
  assess->add_option("id", id, "Weak-catch test id")->required();

  auto* stats = app.add_subcommand("stats", "Render statistics tables for a report");
  stats->add_option("report", report, "Report path")->required();

  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus tooling");
  corpus_cmd->require_subcommand(1);
  auto* validate = corpus_cmd->add_subcommand("validate", "Check a corpus directory");
  validate->add_option("dir", dir, "Corpus directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (*run) return cmd_run(corpus, config, out);
  if (*assess) return cmd_assess(report, id);
  if (*stats) return cmd_stats(report);
  if (*validate) return cmd_validate(dir);
  return 1;
}

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "minilang/interpreter.hpp"
#include "minilang/parser.hpp"

namespace testutil {

inline catchjit::minilang::ProgramSet programs(const std::string& source) {
  return catchjit::minilang::single_file(catchjit::minilang::parse(source));
}

inline std::string source_dir() { return CATCHJIT_SOURCE_DIR; }
inline std::string seed_corpus() { return source_dir() + "/corpus/seed"; }
inline std::string fixture() { return CATCHJIT_FIXTURE; }
inline std::string cli() { return CATCHJIT_CLI; }

class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/catchjit-test-XXXXXX";
    path_ = mkdtemp(tmpl);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }
  std::string write(const std::string& name, const std::string& content) const {
    auto p = std::filesystem::path(file(name));
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p) << content;
    return p.string();
  }

 private:
  std::string path_;
};

struct CommandOutput {
  int exit_code = -1;
  std::string output;
};

inline CommandOutput run(const std::string& command) {
  CommandOutput out;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.output.append(buf, n);
  int status = pclose(pipe);
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

}  // namespace testutil

#include <doctest.h>

#include "corpus/corpus.hpp"
#include "helpers.hpp"

using namespace catchjit::corpus;
using testutil::programs;
using testutil::TempDir;

namespace {

void write_case(const TempDir& dir, const std::string& id, const std::string& parent, const std::string& child,
                const std::string& meta = R"({"title": "t", "summary": "s", "status": "ACCEPTED"})") {
  dir.write(id + "/parent/main.ml0", parent);
  dir.write(id + "/child/main.ml0", child);
  if (!meta.empty()) dir.write(id + "/meta.json", meta);
}

}  // namespace

TEST_CASE("load_corpus: seed corpus has at least twenty cases") {
  auto cases = load_corpus(testutil::seed_corpus());
  CHECK(cases.size() >= 20);
  for (size_t i = 1; i < cases.size(); ++i) CHECK(cases[i - 1].id < cases[i].id);
  int buggy = 0, good = 0, bad = 0;
  for (const auto& c : cases) {
    buggy += c.ground_truth && c.ground_truth->buggy;
    good += is_good(c.status);
    bad += is_bad(c.status);
  }
  CHECK(buggy >= 8);
  CHECK(good >= 5);
  CHECK(bad >= 5);
}

TEST_CASE("load_corpus: missing meta file") {
  TempDir dir;
  write_case(dir, "c1", "fn f() { return 1; }", "fn f() { return 2; }", "");
  CHECK_THROWS_AS(load_corpus(dir.path()), CorpusFormatError);
}

TEST_CASE("load_corpus: unparseable child names the case") {
  TempDir dir;
  write_case(dir, "broken_case", "fn f() { return 1; }", "fn f( { }");
  try {
    load_corpus(dir.path());
    FAIL("expected CorpusFormatError");
  } catch (const CorpusFormatError& e) {
    CHECK(e.case_id() == "broken_case");
    CHECK(std::string(e.what()).find("broken_case") != std::string::npos);
  }
}

TEST_CASE("load_corpus: missing directory") { CHECK_THROWS_AS(load_corpus("/nonexistent/corpus"), CorpusFormatError); }

TEST_CASE("status labels partition into good and bad") {
  CHECK(is_good(DiffStatus::ACCEPTED));
  CHECK(is_good(DiffStatus::CLOSED));
  for (auto s : {DiffStatus::ABANDONED, DiffStatus::REVERTED, DiffStatus::CHANGES_PLANNED, DiffStatus::NEEDS_REVISION}) {
    CHECK(is_bad(s));
    CHECK_FALSE(is_good(s));
  }
  CHECK_FALSE(is_good(DiffStatus::UNLABELLED));
  CHECK_FALSE(is_bad(DiffStatus::UNLABELLED));
  CHECK(parse_status("REVERTED") == DiffStatus::REVERTED);
  CHECK_FALSE(parse_status("MERGED").has_value());
}

TEST_CASE("compute_diff: identical sides") {
  auto p = programs("fn f(x) { return x; }");
  CHECK(compute_diff(p, p).empty());
}

TEST_CASE("compute_diff: edited body is one Modified decl") {
  auto d = compute_diff(programs("fn f(x) {\n  return x + 1;\n}\nfn g() {\n  return 0;\n}\n"),
                        programs("fn f(x) {\n  return x + 2;\n}\nfn g() {\n  return 0;\n}\n"));
  REQUIRE(d.changed_decls.size() == 1);
  CHECK(d.changed_decls[0].function == "f");
  CHECK(d.changed_decls[0].kind == ChangeKind::Modified);
  REQUIRE(d.hunks.size() >= 1);
  CHECK(d.hunks[0].removed == std::vector<std::string>{"  return x + 1;"});
  CHECK(d.hunks[0].added == std::vector<std::string>{"  return x + 2;"});
  CHECK(d.render().find("-  return x + 1;") != std::string::npos);
}

TEST_CASE("compute_diff: added and removed functions") {
  auto d = compute_diff(programs("fn f() { return 1; }\n"),
                        programs("fn f() { return 1; }\nfn g() { return 2; }\n"));
  REQUIRE(d.changed_decls.size() == 1);
  CHECK(d.changed_decls[0].kind == ChangeKind::Added);
  auto r = compute_diff(programs("fn f() { return 1; }\nfn g() { return 2; }\n"), programs("fn f() { return 1; }\n"));
  REQUIRE(r.changed_decls.size() == 1);
  CHECK(r.changed_decls[0].kind == ChangeKind::Removed);
}

TEST_CASE("compute_diff: formatting-only change has hunks but no decls") {
  auto d = compute_diff(programs("fn f(x) { return x; }\n"), programs("fn f(x) {\n  return x;\n}\n"));
  CHECK(d.changed_decls.empty());
  CHECK_FALSE(d.hunks.empty());
}

TEST_CASE("risk_score: normalization endpoints") {
  TempDir dir;
  write_case(dir, "a_empty", "fn f() { return 1; }\n", "fn f() { return 1; }\n");
  write_case(dir, "b_small", "fn f() {\n  return 1;\n}\n", "fn f() {\n  return 2;\n}\n");
  write_case(dir, "c_large", "fn f() {\n  return 1;\n}\nfn g() {\n  return 1;\n}\n",
             "fn f() {\n  return 3;\n}\nfn g() {\n  return 4;\n}\nfn h() {\n  return 5;\n}\n");
  auto cases = load_corpus(dir.path());
  REQUIRE(cases.size() == 3);
  CHECK(cases[0].risk_score == 0.0);
  CHECK(cases[2].risk_score == 1.0);
  CHECK(cases[1].risk_score > 0.0);
  CHECK(cases[1].risk_score < 1.0);
  auto raw_b = raw_risk(compute_diff(cases[1].parent, cases[1].child));
  auto raw_c = raw_risk(compute_diff(cases[2].parent, cases[2].child));
  CHECK(cases[1].risk_score == doctest::Approx(raw_b / raw_c).epsilon(1e-12));
}

TEST_CASE("risk_score: seed corpus scores lie in [0,1] with a maximum of 1") {
  auto cases = load_corpus(testutil::seed_corpus());
  double mx = 0;
  for (const auto& c : cases) {
    CHECK(c.risk_score >= 0.0);
    CHECK(c.risk_score <= 1.0);
    mx = std::max(mx, c.risk_score);
  }
  CHECK(mx == 1.0);
}

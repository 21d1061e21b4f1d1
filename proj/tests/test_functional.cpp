#include "vforge/errors.hpp"
#include "vforge/functional.hpp"
#include "vforge/util.hpp"

#include "support/paths.hpp"

#include <doctest.h>

#include <random>

using namespace vforge;
namespace fs = std::filesystem;

namespace {

DafnyTool mock_tool() { return DafnyTool(test::mock_dafny_path()); }

std::string program(const std::string& name) {
  return read_file(test::fixtures_dir() / "programs" / name);
}

ExecutionResult ok_result(const std::string& out) {
  ExecutionResult result;
  result.exit_code = 0;
  result.stdout_text = out;
  return result;
}

}  // namespace

TEST_CASE("normalize_output") {
  CHECK(normalize_output("a\r\nb\r\n") == "a\nb");
  CHECK(normalize_output("a  \nb\t\n\n\n") == "a\nb");
  CHECK(normalize_output("<\n") == "<");
  CHECK(normalize_output("") == "");

  std::mt19937 rng(7);
  const std::string alphabet = "ab \t\r\n<>=";
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 24);
    for (int i = 0; i < n; ++i) text += alphabet[rng() % alphabet.size()];
    const std::string once = normalize_output(text);
    CHECK(normalize_output(once) == once);  // idempotent
  }
}

TEST_CASE("judge verdicts") {
  std::string diff;
  CHECK(judge(ok_result("<\n"), "<", &diff) == Verdict::Pass);
  CHECK(judge(ok_result(">"), "<", &diff) == Verdict::WrongAnswer);
  CHECK(diff == "line 1: expected \"<\", got \">\"");

  ExecutionResult timed;
  timed.timed_out = true;
  timed.stdout_text = "<";
  CHECK(judge(timed, "<", nullptr) == Verdict::TimeLimit);

  ExecutionResult crashed;
  crashed.exit_code = 1;
  CHECK(judge(crashed, "<", &diff) == Verdict::RuntimeError);
}

TEST_CASE("oracle_magic_formula matches its stated examples") {
  CHECK(oracle_magic_formula(0, 0, 0, 1, 5) == 6);
  CHECK(oracle_magic_formula(0, 0, 1, 2, 9) == 0);
  CHECK(oracle_magic_formula(1, 0, 0, 2, 4) == 3);
  CHECK_THROWS_AS(oracle_magic_formula(1, 1, 1, 0, 5), DomainError);
  CHECK_THROWS_AS(oracle_magic_formula(1, 1, 1, 1, -1), DomainError);
}

TEST_CASE("reference relational program passes its suite") {
  const DafnyTool dafny = mock_tool();
  ProgramRunner runner(dafny, test::fresh_dir("runner-rel"));
  const std::string src = program("relational_verified.dfy");

  const ExecutionResult lt = runner.compile_and_run(src, "10 20", RunLimits{});
  CHECK(normalize_output(lt.stdout_text) == "<");
  const ExecutionResult eq = runner.compile_and_run(src, "10 10", RunLimits{});
  CHECK(normalize_output(eq.stdout_text) == "=");

  const std::vector<TestCase> suite = {
      {"10 20", "<", ""}, {"20 10", ">", ""}, {"10 10", "=", ""}};
  const FunctionalReport report = runner.run_suite(src, suite, RunLimits{});
  CHECK(report.passed);
  REQUIRE(report.verdicts.size() == 3);
  for (const auto& verdict : report.verdicts) {
    CHECK(verdict.verdict == Verdict::Pass);
  }
}

TEST_CASE("vacuity catch: verified program that fails its suite") {
  const DafnyTool dafny = mock_tool();
  const std::string vacuous = program("vacuous_equals.dfy");

  // Formal layer says Verified ...
  CHECK(classify(dafny.verify(vacuous, VerifyLimits{}), true) ==
        OutcomeCategory::Verified);

  // ... the functional layer disagrees.
  ProgramRunner runner(dafny, test::fresh_dir("runner-vac"));
  const std::vector<TestCase> suite = {
      {"10 20", "<", ""}, {"20 10", ">", ""}, {"10 10", "=", ""}};
  const FunctionalReport report = runner.run_suite(vacuous, suite, RunLimits{});
  CHECK_FALSE(report.passed);
  int wrong = 0;
  for (const auto& verdict : report.verdicts) {
    if (verdict.verdict == Verdict::WrongAnswer) ++wrong;
  }
  CHECK(wrong == 2);

  // Weak-spec heuristic flags it, and not the honest fixture.
  CHECK(has_weak_specification(vacuous));
  CHECK_FALSE(has_weak_specification(program("relational_verified.dfy")));
  CHECK_FALSE(has_weak_specification(program("magic_formula.dfy")));
  CHECK(has_weak_specification("method M() returns (r: int)\n  ensures true\n{ r := 0; }"));
}

TEST_CASE("oracle agrees with the verified magic formula fixture at runtime") {
  const DafnyTool dafny = mock_tool();
  ProgramRunner runner(dafny, test::fresh_dir("runner-magic"));
  const std::string src = program("magic_formula.dfy");

  std::mt19937 rng(2024);
  auto draw = [&](long long lo, long long hi) {
    return lo + static_cast<long long>(rng() % static_cast<unsigned long>(hi - lo + 1));
  };
  for (int trial = 0; trial < 100; ++trial) {
    const long long a = draw(-50, 50), b = draw(-50, 50), c = draw(-50, 50);
    const long long d = draw(1, 20), l = draw(0, 100);
    const std::string input = std::to_string(a) + " " + std::to_string(b) + " " +
                              std::to_string(c) + " " + std::to_string(d) + " " +
                              std::to_string(l);
    const ExecutionResult result = runner.compile_and_run(src, input, RunLimits{});
    REQUIRE(result.exit_code == 0);
    CHECK(normalize_output(result.stdout_text) ==
          std::to_string(oracle_magic_formula(a, b, c, d, l)));
  }
}

TEST_CASE("a Main-less program is a build failure") {
  const DafnyTool dafny = mock_tool();
  ProgramRunner runner(dafny, test::fresh_dir("runner-nomain"));
  const std::string src = program("no_main.dfy");

  CHECK_THROWS_AS(runner.compile_and_run(src, "", RunLimits{}), BuildFailureError);

  const std::vector<TestCase> suite = {{"1 2", "3", ""}, {"2 3", "5", ""}};
  const FunctionalReport report = runner.run_suite(src, suite, RunLimits{});
  CHECK_FALSE(report.passed);
  REQUIRE(report.verdicts.size() == 2);
  for (const auto& verdict : report.verdicts) {
    CHECK(verdict.verdict == Verdict::RuntimeError);
    CHECK(verdict.diff_summary.find("build failure") != std::string::npos);
  }
}

TEST_CASE("a hanging program gets a TimeLimit verdict") {
  const DafnyTool dafny = mock_tool();
  ProgramRunner runner(dafny, test::fresh_dir("runner-hang"));
  RunLimits limits;
  limits.case_timeout = std::chrono::milliseconds(400);
  const FunctionalReport report =
      runner.run_suite(program("run_hang.dfy"), {{"1", "never", ""}}, limits);
  REQUIRE(report.verdicts.size() == 1);
  CHECK(report.verdicts[0].verdict == Verdict::TimeLimit);
}

TEST_CASE("run_suite rejects an empty test list") {
  const DafnyTool dafny = mock_tool();
  ProgramRunner runner(dafny, test::fresh_dir("runner-empty"));
  CHECK_THROWS_AS(runner.run_suite("method Main() {}", {}, RunLimits{}), DomainError);
}

TEST_CASE("builds are cached per source") {
  const DafnyTool dafny = mock_tool();
  const fs::path work = test::fresh_dir("runner-cache");
  ProgramRunner runner(dafny, work);
  const std::string src = program("relational_verified.dfy");

  runner.compile_and_run(src, "1 2", RunLimits{});
  fs::path exe;
  for (const auto& entry : fs::recursive_directory_iterator(work)) {
    if (entry.path().filename() == "prog") exe = entry.path();
  }
  REQUIRE(!exe.empty());
  const auto stamp = fs::last_write_time(exe);
  runner.compile_and_run(src, "3 4", RunLimits{});
  CHECK(fs::last_write_time(exe) == stamp);
}

#pragma once

#include "vforge/corpus.hpp"
#include "vforge/errors.hpp"
#include "vforge/verification.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace vforge {

struct ExecutionResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
  std::chrono::milliseconds wall_time{0};
  bool timed_out = false;
};

enum class Verdict { Pass, WrongAnswer, RuntimeError, TimeLimit };
const char* verdict_name(Verdict verdict);

struct CaseVerdict {
  int case_index = 0;
  Verdict verdict = Verdict::Pass;
  std::string diff_summary;  // empty when not applicable
};

struct FunctionalReport {
  std::vector<CaseVerdict> verdicts;
  bool passed = false;  // true iff every verdict is Pass
};

struct BuildFailureError : Error {
  explicit BuildFailureError(std::vector<Diagnostic> diagnostics_in)
      : Error("Dafny build failed"), diagnostics(std::move(diagnostics_in)) {}
  std::vector<Diagnostic> diagnostics;
};

struct RunLimits {
  std::chrono::milliseconds case_timeout{10000};
};

/// CRLF -> LF, trailing whitespace stripped per line, trailing blank lines
/// dropped. Idempotent.
std::string normalize_output(const std::string& text);

Verdict judge(const ExecutionResult& result, const std::string& expected,
              std::string* diff_summary = nullptr);

/// |{x in Z : 0 <= x <= l, (a*x^2 + b*x + c) mod d = 0}| by enumeration;
/// generates fixture test suites. Throws DomainError unless d > 0, l >= 0.
long long oracle_magic_formula(long long a, long long b, long long c,
                               long long d, long long l);

/// Zero meaningful `ensures` clauses in the source: the verifier had nothing
/// to prove, so a pass is likely vacuous. Warning signal only.
bool has_weak_specification(const std::string& src);

/// Builds executables through the Dafny toolchain (one build per distinct
/// source, cached) and runs them inside an isolated working directory.
class ProgramRunner {
 public:
  ProgramRunner(DafnyTool tool, std::filesystem::path work_dir);

  /// Throws BuildFailureError when no executable can be produced.
  ExecutionResult compile_and_run(const std::string& src,
                                  const std::string& stdin_text,
                                  const RunLimits& limits);

  /// One verdict per test case, in order; never short-circuits.
  /// Precondition: tests non-empty (DomainError otherwise). A build failure
  /// yields RuntimeError on every case with the diagnostic attached.
  FunctionalReport run_suite(const std::string& src,
                             const std::vector<TestCase>& tests,
                             const RunLimits& limits);

 private:
  std::filesystem::path executable_for(const std::string& src);

  DafnyTool tool_;
  std::filesystem::path work_dir_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> build_locks_;
};

}  // namespace vforge

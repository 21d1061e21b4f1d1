#include "vforge/functional.hpp"

#include "vforge/errors.hpp"
#include "vforge/subprocess.hpp"
#include "vforge/util.hpp"

#include <algorithm>

namespace vforge {

namespace fs = std::filesystem;

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::WrongAnswer: return "wrong_answer";
    case Verdict::RuntimeError: return "runtime_error";
    case Verdict::TimeLimit: return "time_limit";
  }
  return "unknown";
}

std::string normalize_output(const std::string& text) {
  std::string unix_text;
  unix_text.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    unix_text += text[i];
  }

  std::vector<std::string> lines = split_lines(unix_text);
  for (std::string& line : lines) {
    while (!line.empty() &&
           std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
  }
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  return join_lines(lines);
}

Verdict judge(const ExecutionResult& result, const std::string& expected,
              std::string* diff_summary) {
  if (result.timed_out) {
    return Verdict::TimeLimit;
  }
  if (result.exit_code != 0) {
    if (diff_summary) {
      *diff_summary = "exit code " + std::to_string(result.exit_code);
    }
    return Verdict::RuntimeError;
  }
  const std::string got = normalize_output(result.stdout_text);
  const std::string want = normalize_output(expected);
  if (got == want) {
    return Verdict::Pass;
  }
  if (diff_summary) {
    const auto got_lines = split_lines(got);
    const auto want_lines = split_lines(want);
    const std::size_t n = std::max(got_lines.size(), want_lines.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string g = i < got_lines.size() ? got_lines[i] : "<missing>";
      const std::string w = i < want_lines.size() ? want_lines[i] : "<missing>";
      if (g != w) {
        *diff_summary = "line " + std::to_string(i + 1) + ": expected \"" + w +
                        "\", got \"" + g + "\"";
        break;
      }
    }
  }
  return Verdict::WrongAnswer;
}

long long oracle_magic_formula(long long a, long long b, long long c,
                               long long d, long long l) {
  if (d <= 0 || l < 0) {
    throw DomainError("oracle_magic_formula requires d > 0 and l >= 0");
  }
  long long count = 0;
  for (long long x = 0; x <= l; ++x) {
    const long long value = a * x * x + b * x + c;
    if (value % d == 0) ++count;
  }
  return count;
}

bool has_weak_specification(const std::string& src) {
  std::size_t pos = 0;
  bool found_meaningful = false;
  while ((pos = src.find("ensures", pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !(std::isalnum(static_cast<unsigned char>(
                                           src[pos - 1])) ||
                                       src[pos - 1] == '_');
    std::size_t after = pos + 7;
    const bool right_ok =
        after >= src.size() ||
        !(std::isalnum(static_cast<unsigned char>(src[after])) || src[after] == '_');
    pos = after;
    if (!left_ok || !right_ok) continue;

    std::size_t end = src.find('\n', after);
    if (end == std::string::npos) end = src.size();
    std::string clause = trim(src.substr(after, end - after));
    if (!clause.empty() && clause != "true" && clause != "true;") {
      found_meaningful = true;
    }
  }
  return !found_meaningful;
}

ProgramRunner::ProgramRunner(DafnyTool tool, fs::path work_dir)
    : tool_(std::move(tool)), work_dir_(std::move(work_dir)) {
  fs::create_directories(work_dir_);
}

fs::path ProgramRunner::executable_for(const std::string& src) {
  const std::string key = to_hex64(fnv1a64(src));
  const fs::path build_dir = work_dir_ / ("build-" + key);
  const fs::path exe = build_dir / "prog";

  std::shared_ptr<std::mutex> lock;
  {
    std::lock_guard guard(mutex_);
    auto& slot = build_locks_[key];
    if (!slot) slot = std::make_shared<std::mutex>();
    lock = slot;
  }
  std::lock_guard build_guard(*lock);

  if (fs::exists(exe)) {
    return exe;
  }
  fs::create_directories(build_dir);
  const fs::path source_file = build_dir / "input.dfy";
  write_file(source_file, src);

  RunOptions options;
  options.argv = {tool_.binary().string(), "build", source_file.string(),
                  "--output", exe.string()};
  options.timeout = std::chrono::milliseconds{120000};
  RunResult run = run_process(options);
  if (run.exit_code != 0 || !fs::exists(exe)) {
    auto diagnostics =
        parse_diagnostics(run.stdout_text, run.stderr_text, run.exit_code);
    if (diagnostics.empty()) {
      Diagnostic diag;
      diag.message = "build produced no executable (exit " +
                     std::to_string(run.exit_code) + ")";
      diagnostics.push_back(std::move(diag));
    }
    throw BuildFailureError(std::move(diagnostics));
  }
  return exe;
}

ExecutionResult ProgramRunner::compile_and_run(const std::string& src,
                                               const std::string& stdin_text,
                                               const RunLimits& limits) {
  const fs::path exe = executable_for(src);

  // Generated code is untrusted; give it an empty scratch directory.
  const fs::path sandbox = exe.parent_path() / "run";
  fs::create_directories(sandbox);

  RunOptions options;
  options.argv = {exe.string()};
  options.stdin_text = stdin_text;
  options.timeout = limits.case_timeout;
  options.cwd = sandbox;
  RunResult run = run_process(options);

  ExecutionResult result;
  result.exit_code = run.exit_code;
  result.stdout_text = run.stdout_text;
  result.stderr_text = run.stderr_text;
  result.wall_time = run.wall_time;
  result.timed_out = run.timed_out;
  return result;
}

FunctionalReport ProgramRunner::run_suite(const std::string& src,
                                          const std::vector<TestCase>& tests,
                                          const RunLimits& limits) {
  if (tests.empty()) {
    throw DomainError("run_suite requires a non-empty test suite");
  }

  FunctionalReport report;
  try {
    for (std::size_t i = 0; i < tests.size(); ++i) {
      ExecutionResult result = compile_and_run(src, tests[i].input, limits);
      CaseVerdict verdict;
      verdict.case_index = static_cast<int>(i);
      verdict.verdict = judge(result, tests[i].expected_output, &verdict.diff_summary);
      report.verdicts.push_back(std::move(verdict));
    }
  } catch (const BuildFailureError& ex) {
    report.verdicts.clear();
    std::string detail = ex.diagnostics.empty() ? std::string("build failure")
                                                : ex.diagnostics.front().message;
    for (std::size_t i = 0; i < tests.size(); ++i) {
      report.verdicts.push_back(
          {static_cast<int>(i), Verdict::RuntimeError, "build failure: " + detail});
    }
  }
  report.passed = std::all_of(
      report.verdicts.begin(), report.verdicts.end(),
      [](const CaseVerdict& v) { return v.verdict == Verdict::Pass; });
  return report;
}

}  // namespace vforge

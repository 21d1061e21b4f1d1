#include "vforge/verification.hpp"

#include "vforge/errors.hpp"
#include "vforge/subprocess.hpp"
#include "vforge/util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <regex>

namespace vforge {

namespace fs = std::filesystem;

const char* category_name(OutcomeCategory category) {
  switch (category) {
    case OutcomeCategory::Verified: return "verified";
    case OutcomeCategory::SyntaxError: return "syntax_error";
    case OutcomeCategory::SemanticTypeError: return "semantic_type_error";
    case OutcomeCategory::VerificationError: return "verification_error";
    case OutcomeCategory::Timeout: return "timeout";
    case OutcomeCategory::ExtractionFailure: return "extraction_failure";
    case OutcomeCategory::ToolError: return "tool_error";
  }
  return "unknown";
}

OutcomeCategory category_from_name(const std::string& name) {
  for (OutcomeCategory c :
       {OutcomeCategory::Verified, OutcomeCategory::SyntaxError,
        OutcomeCategory::SemanticTypeError, OutcomeCategory::VerificationError,
        OutcomeCategory::Timeout, OutcomeCategory::ExtractionFailure,
        OutcomeCategory::ToolError}) {
    if (name == category_name(c)) return c;
  }
  throw ConfigError("unknown outcome category: " + name);
}

namespace {

// Message fragments observed in the Dafny 4.x capture corpus
// (tests/fixtures/dafny_capture). Checked in toolchain-stage order.
const char* const kParseFragments[] = {
    " expected", "invalid ", "parse error",
};
const char* const kResolveFragments[] = {
    "unresolved identifier", "not assignable", "undeclared",
    "does not exist",        "duplicate",      "wrong number of",
    "type mismatch",         "does not take",  "is not a member",
};
const char* const kVerifyFragments[] = {
    "could not be proved", "might not hold",     "cannot prove termination",
    "decreases clause",    "index out of range", "division by zero",
    "invariant",           "precondition",       "postcondition",
    "assertion",           "might be violated",
};

bool matches_any(const std::string& lowered, const char* const* table, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (lowered.find(table[i]) != std::string::npos) return true;
  }
  return false;
}

PhaseHint phase_from_message(const std::string& message) {
  const std::string lowered = to_lower(message);
  if (matches_any(lowered, kParseFragments, std::size(kParseFragments))) {
    return PhaseHint::Parse;
  }
  if (matches_any(lowered, kResolveFragments, std::size(kResolveFragments))) {
    return PhaseHint::Resolve;
  }
  if (matches_any(lowered, kVerifyFragments, std::size(kVerifyFragments))) {
    return PhaseHint::Verify;
  }
  return PhaseHint::Unknown;
}

const std::regex kLocatedLine(
    R"(^(.+?)\((\d+),(\d+)\): (Error|Warning): (.*)$)");
const std::regex kSummaryLine(
    R"(Dafny program verifier finished with (\d+) verified, (\d+) error)");

}  // namespace

bool success_summary_present(const std::string& output) {
  std::smatch match;
  std::string::const_iterator cursor = output.cbegin();
  while (std::regex_search(cursor, output.cend(), match, kSummaryLine)) {
    if (match[2].str() == "0") return true;
    cursor = match.suffix().first;
  }
  return false;
}

std::vector<Diagnostic> parse_diagnostics(const std::string& stdout_text,
                                          const std::string& stderr_text,
                                          int exit_code) {
  (void)exit_code;
  const std::string combined =
      stdout_text + (stderr_text.empty() ? "" : "\n" + stderr_text);

  // Stage trailers name the phase for the whole run; they back up the
  // per-message tables when a message is not recognized.
  PhaseHint trailer_phase = PhaseHint::Unknown;
  if (combined.find("parse errors detected") != std::string::npos ||
      combined.find("parse error detected") != std::string::npos) {
    trailer_phase = PhaseHint::Parse;
  } else if (combined.find("resolution/type errors detected") != std::string::npos ||
             combined.find("resolution/type error detected") != std::string::npos) {
    trailer_phase = PhaseHint::Resolve;
  }

  std::vector<Diagnostic> diagnostics;
  for (const std::string& line : split_lines(combined)) {
    std::smatch match;
    Diagnostic diag;
    if (std::regex_match(line, match, kLocatedLine)) {
      diag.file = match[1];
      try {
        diag.line = std::stoi(match[2]);
        diag.column = std::stoi(match[3]);
      } catch (const std::exception&) {
        diag.line.reset();
        diag.column.reset();
      }
      diag.severity = match[4] == "Warning" ? Severity::Warning : Severity::Error;
      diag.message = match[5];
    } else if (line.find("Error") != std::string::npos) {
      diag.severity = Severity::Error;
      diag.message = trim(line);
    } else {
      continue;
    }
    diag.phase = phase_from_message(diag.message);
    if (diag.phase == PhaseHint::Unknown) diag.phase = trailer_phase;
    diagnostics.push_back(std::move(diag));
  }
  return diagnostics;
}

OutcomeCategory classify(const VerifierReport& report, bool extraction_ok) {
  if (!extraction_ok) return OutcomeCategory::ExtractionFailure;
  if (report.verified) return OutcomeCategory::Verified;
  if (report.timed_out) return OutcomeCategory::Timeout;

  bool parse = false, resolve = false, verify = false;
  for (const auto& diag : report.diagnostics) {
    if (diag.severity != Severity::Error) continue;
    switch (diag.phase) {
      case PhaseHint::Parse: parse = true; break;
      case PhaseHint::Resolve: resolve = true; break;
      case PhaseHint::Verify: verify = true; break;
      case PhaseHint::Unknown: break;
    }
  }
  if (parse) return OutcomeCategory::SyntaxError;
  if (resolve) return OutcomeCategory::SemanticTypeError;
  if (verify) return OutcomeCategory::VerificationError;
  return OutcomeCategory::ToolError;
}

DafnyTool::DafnyTool(fs::path binary) : binary_(std::move(binary)) {}

DafnyTool DafnyTool::resolve(const std::string& flag_value) {
  auto usable = [](const fs::path& p) {
    std::error_code ec;
    return fs::exists(p, ec) && !fs::is_directory(p, ec);
  };

  if (!flag_value.empty()) {
    if (!usable(flag_value)) {
      throw DafnyNotFoundError("Dafny binary not found at " + flag_value);
    }
    return DafnyTool(flag_value);
  }
  if (const char* env = std::getenv("VFORGE_DAFNY"); env && *env) {
    if (!usable(env)) {
      throw DafnyNotFoundError(std::string("VFORGE_DAFNY points at ") + env +
                               " which does not exist");
    }
    return DafnyTool(env);
  }
  if (const char* path_env = std::getenv("PATH")) {
    std::string path(path_env);
    std::size_t start = 0;
    while (start <= path.size()) {
      std::size_t end = path.find(':', start);
      if (end == std::string::npos) end = path.size();
      fs::path candidate = fs::path(path.substr(start, end - start)) / "dafny";
      if (usable(candidate)) return DafnyTool(candidate);
      start = end + 1;
    }
  }
  throw DafnyNotFoundError(
      "no Dafny binary: pass --dafny-path, set VFORGE_DAFNY, or put dafny on PATH");
}

namespace {

fs::path fresh_scratch_dir() {
  static std::atomic<unsigned> counter{0};
  const fs::path base = fs::temp_directory_path() / "vforge";
  fs::create_directories(base);
  const unsigned n = counter.fetch_add(1);
  fs::path dir;
  do {
    dir = base / ("verify-" + std::to_string(::getpid()) + "-" + std::to_string(n) +
                  "-" + to_hex64(fnv1a64(std::to_string(std::rand()))));
  } while (fs::exists(dir));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

VerifierReport DafnyTool::verify(const std::string& src, const VerifyLimits& limits,
                                 const fs::path& retain_dir) const {
  const fs::path scratch = fresh_scratch_dir();
  const fs::path source_file = scratch / "input.dfy";
  write_file(source_file, src);

  RunOptions options;
  options.argv = {binary_.string(), "verify", source_file.string()};
  options.timeout = limits.timeout;

  RunResult run;
  try {
    run = run_process(options);
  } catch (const SpawnError&) {
    std::error_code ec;
    fs::remove_all(scratch, ec);
    throw;
  }

  VerifierReport report;
  report.exit_code = run.exit_code;
  report.stdout_text = run.stdout_text;
  report.stderr_text = run.stderr_text;
  report.wall_time = run.wall_time;
  report.timed_out = run.timed_out;
  report.diagnostics = parse_diagnostics(run.stdout_text, run.stderr_text, run.exit_code);

  const bool any_error_diag =
      std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                  [](const Diagnostic& d) { return d.severity == Severity::Error; });
  report.verified = !report.timed_out && report.exit_code == 0 &&
                    success_summary_present(report.stdout_text) && !any_error_diag;

  std::error_code ec;
  if (report.verified || retain_dir.empty()) {
    fs::remove_all(scratch, ec);
  } else {
    fs::create_directories(retain_dir, ec);
    fs::copy_file(source_file, retain_dir / "input.dfy",
                  fs::copy_options::overwrite_existing, ec);
    write_file(retain_dir / "verifier.txt",
               "exit: " + std::to_string(run.exit_code) + "\n--- stdout\n" +
                   run.stdout_text + "\n--- stderr\n" + run.stderr_text);
    fs::remove_all(scratch, ec);
  }
  return report;
}

}  // namespace vforge

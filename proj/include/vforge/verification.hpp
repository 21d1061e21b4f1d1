#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vforge {

enum class Severity { Error, Warning };
enum class PhaseHint { Parse, Resolve, Verify, Unknown };

struct Diagnostic {
  std::string file;            // empty for location-free lines
  std::optional<int> line;     // 1-based
  std::optional<int> column;   // 1-based
  Severity severity = Severity::Error;
  std::string message;
  PhaseHint phase = PhaseHint::Unknown;
};

struct VerifierReport {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
  std::vector<Diagnostic> diagnostics;
  std::chrono::milliseconds wall_time{0};
  bool timed_out = false;
  bool verified = false;
};

enum class OutcomeCategory {
  Verified,
  SyntaxError,
  SemanticTypeError,
  VerificationError,
  Timeout,
  ExtractionFailure,
  ToolError,
};

const char* category_name(OutcomeCategory category);
OutcomeCategory category_from_name(const std::string& name);  // throws ConfigError

/// One Diagnostic per `<file>(<line>,<col>): <severity>: <message>` line plus
/// a location-free Diagnostic for every other line containing "Error".
/// Never throws on arbitrary text.
std::vector<Diagnostic> parse_diagnostics(const std::string& stdout_text,
                                          const std::string& stderr_text,
                                          int exit_code);

/// "Dafny program verifier finished with N verified, 0 errors"
bool success_summary_present(const std::string& output);

/// Total classification of one round. Precedence: ExtractionFailure >
/// Timeout > SyntaxError > SemanticTypeError > VerificationError > ToolError.
OutcomeCategory classify(const VerifierReport& report, bool extraction_ok);

struct VerifyLimits {
  std::chrono::milliseconds timeout{120000};
};

/// Wrapper around the Dafny binary (`dafny verify` / `dafny build`).
class DafnyTool {
 public:
  explicit DafnyTool(std::filesystem::path binary);

  /// Resolution order: explicit flag value, VFORGE_DAFNY, `dafny` on PATH.
  /// Throws DafnyNotFoundError.
  static DafnyTool resolve(const std::string& flag_value);

  /// Writes `src` to a temp file and runs the verifier. The temp file is
  /// removed on success; on failure it is copied into `retain_dir` (when
  /// given) together with the captured output.
  VerifierReport verify(const std::string& src, const VerifyLimits& limits,
                        const std::filesystem::path& retain_dir = {}) const;

  const std::filesystem::path& binary() const { return binary_; }

 private:
  std::filesystem::path binary_;
};

}  // namespace vforge

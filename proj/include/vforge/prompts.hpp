#pragma once

#include "vforge/corpus.hpp"

#include <string>

namespace vforge {

/// Fixed system instruction shared by every strategy.
inline constexpr const char* kSystemPrompt =
    "You are an expert in Dafny. Output ONLY raw Dafny code.";

struct PromptText {
  std::string system;
  std::string user;

  friend bool operator==(const PromptText&, const PromptText&) = default;
};

enum class Strategy {
  Contextless,
  Signature,
  SelfHealContextless,
  SelfHealSignature,
};

const char* strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);  // throws ConfigError
bool strategy_uses_signature(Strategy strategy);
bool strategy_self_heals(Strategy strategy);

/// Natural-language task only. Throws EmptyDescriptionError.
PromptText render_contextless(const Problem& problem);

/// Contextless body plus the trailing method-signature section.
/// Throws MissingSignatureError.
PromptText render_signature(const Problem& problem);

/// Repair turn embedding the verifier output verbatim (subject to the line
/// cap). The previous code is carried in the conversation history, not in
/// this message. Throws EmptyVerifierOutputError.
PromptText render_repair(const std::string& previous_code,
                         const std::string& verifier_output);

/// Keeps the first 150 and last 50 lines with an elision marker once the
/// output exceeds 200 lines; parse errors lead, proof errors trail.
std::string truncate_verifier_output(const std::string& output);

}  // namespace vforge

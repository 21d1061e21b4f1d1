#include "vforge/prompts.hpp"

#include "vforge/errors.hpp"
#include "vforge/util.hpp"

namespace vforge {

namespace {

constexpr std::size_t kMaxFeedbackLines = 200;
constexpr std::size_t kFeedbackHeadLines = 150;
constexpr std::size_t kFeedbackTailLines = 50;

std::string contextless_user(const Problem& problem) {
  std::string user = "Generate one Dafny source file for the following task.\n\n";
  user += "Problem ID: " + problem.id + "\n";
  user += "Task Description: " + problem.description;
  return user;
}

}  // namespace

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Contextless: return "contextless";
    case Strategy::Signature: return "signature";
    case Strategy::SelfHealContextless: return "self-heal-contextless";
    case Strategy::SelfHealSignature: return "self-heal-signature";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::Contextless, Strategy::Signature,
                     Strategy::SelfHealContextless, Strategy::SelfHealSignature}) {
    if (name == strategy_name(s)) return s;
  }
  throw ConfigError("unknown strategy: " + name);
}

bool strategy_uses_signature(Strategy strategy) {
  return strategy == Strategy::Signature || strategy == Strategy::SelfHealSignature;
}

bool strategy_self_heals(Strategy strategy) {
  return strategy == Strategy::SelfHealContextless ||
         strategy == Strategy::SelfHealSignature;
}

PromptText render_contextless(const Problem& problem) {
  if (problem.description.empty()) {
    throw EmptyDescriptionError("problem " + problem.id + " has an empty description");
  }
  return {kSystemPrompt, contextless_user(problem)};
}

PromptText render_signature(const Problem& problem) {
  if (!problem.signature || trim(*problem.signature).empty()) {
    throw MissingSignatureError("problem " + problem.id + " has no method signature");
  }
  PromptText prompt = render_contextless(problem);
  prompt.user += "\n\nMethod Signature Prompt: " + *problem.signature;
  return prompt;
}

PromptText render_repair(const std::string& previous_code,
                         const std::string& verifier_output) {
  (void)previous_code;  // travels in the conversation history
  if (trim(verifier_output).empty()) {
    throw EmptyVerifierOutputError("repair prompt needs non-empty verifier output");
  }
  std::string body = truncate_verifier_output(verifier_output);
  while (!body.empty() && body.back() == '\n') body.pop_back();

  std::string user =
      "The previous Dafny code failed verification with the following errors:\n";
  user += body;
  user +=
      "\n\nPlease repair the code to satisfy all specifications. "
      "Output ONLY the raw fixed Dafny code.";
  return {kSystemPrompt, user};
}

std::string truncate_verifier_output(const std::string& output) {
  std::vector<std::string> lines = split_lines(output);
  if (lines.size() <= kMaxFeedbackLines) {
    return output;
  }
  std::vector<std::string> kept;
  kept.reserve(kFeedbackHeadLines + kFeedbackTailLines + 1);
  kept.insert(kept.end(), lines.begin(), lines.begin() + kFeedbackHeadLines);
  kept.push_back("[... " + std::to_string(lines.size() - kFeedbackHeadLines -
                                          kFeedbackTailLines) +
                 " lines elided ...]");
  kept.insert(kept.end(), lines.end() - kFeedbackTailLines, lines.end());
  return join_lines(kept);
}

}  // namespace vforge

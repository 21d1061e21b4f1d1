#pragma once

#include "vforge/healing.hpp"

#include <string>
#include <vector>

namespace vforge::test {

/// Manifest fixture encoding published success counts over 11 problems:
/// a contextless row (0/4/6 at k=1/3/5), two signature rows (6/7/7 and
/// 4/5/8), and the self-healing columns (k=1) whose rates land on 72.73,
/// 81.82 and 90.91 percent. Failures are syntax_error rounds for one-shot
/// strategies and timeout rounds for self-healing ones.
inline std::vector<Episode> published_tables_fixture() {
  std::vector<Episode> episodes;

  auto problem_id = [](int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "p%02d", i + 1);
    return std::string(buf);
  };

  auto add_episode = [&](const std::string& model, double temp, Strategy strategy,
                         int problem, int attempt, bool verified) {
    Episode episode;
    episode.problem_id = problem_id(problem);
    episode.model = model;
    episode.temperature = temp;
    episode.strategy = strategy;
    episode.attempt = attempt;
    Round round;
    round.index = 0;
    round.prompt = {"system", "user"};
    round.raw_response = verified ? "method M() { }" : "method M() {";
    if (verified) {
      round.extracted = round.raw_response;
      round.category = OutcomeCategory::Verified;
      VerifierReport report;
      report.exit_code = 0;
      report.verified = true;
      round.report = report;
    } else {
      round.category = strategy_self_heals(strategy)
                           ? OutcomeCategory::Timeout
                           : OutcomeCategory::SyntaxError;
      if (!strategy_self_heals(strategy)) {
        round.extracted = "method M() {";
        VerifierReport report;
        report.exit_code = 2;
        Diagnostic diag;
        diag.file = "input.dfy";
        diag.line = 1;
        diag.column = 13;
        diag.message = "rbrace expected";
        diag.phase = PhaseHint::Parse;
        report.diagnostics.push_back(diag);
        round.report = report;
      }
    }
    episode.rounds.push_back(std::move(round));
    episode.final = episode.rounds.back().category;
    episodes.push_back(std::move(episode));
  };

  // k=5 cells given per-problem first-success attempt index (-1 = never).
  auto add_k5_cell = [&](const std::string& model, double temp, Strategy strategy,
                         const std::vector<int>& first_success) {
    for (int problem = 0; problem < static_cast<int>(first_success.size());
         ++problem) {
      for (int attempt = 0; attempt < 5; ++attempt) {
        add_episode(model, temp, strategy, problem, attempt,
                    attempt == first_success[problem]);
      }
    }
  };
  // k=1 cells: the first `successes` problems verify.
  auto add_k1_cell = [&](const std::string& model, double temp, Strategy strategy,
                         int successes) {
    for (int problem = 0; problem < 11; ++problem) {
      add_episode(model, temp, strategy, problem, 0, problem < successes);
    }
  };

  add_k5_cell("gemma-4-31b", 0.2, Strategy::Contextless,
              {1, 1, 1, 1, 3, 3, -1, -1, -1, -1, -1});
  add_k5_cell("gpt-oss-120b", 0.8, Strategy::Signature,
              {0, 0, 0, 0, 0, 0, 1, -1, -1, -1, -1});
  add_k5_cell("qwen-3.5-9b", 0.8, Strategy::Signature,
              {0, 0, 0, 0, 2, 4, 4, 4, -1, -1, -1});

  add_k1_cell("gemma-4-31b", 0.0, Strategy::SelfHealContextless, 8);
  add_k1_cell("gemma-4-31b", 0.2, Strategy::SelfHealContextless, 10);
  add_k1_cell("gemma-4-31b", 0.4, Strategy::SelfHealContextless, 9);
  add_k1_cell("gemma-4-31b", 0.6, Strategy::SelfHealContextless, 10);
  add_k1_cell("gemma-4-31b", 0.8, Strategy::SelfHealContextless, 8);

  add_k1_cell("gemma-4-31b", 0.0, Strategy::SelfHealSignature, 7);
  add_k1_cell("gemma-4-31b", 0.2, Strategy::SelfHealSignature, 7);
  add_k1_cell("gemma-4-31b", 0.4, Strategy::SelfHealSignature, 8);
  add_k1_cell("gemma-4-31b", 0.6, Strategy::SelfHealSignature, 9);
  add_k1_cell("gemma-4-31b", 0.8, Strategy::SelfHealSignature, 9);
  add_k1_cell("gpt-oss-120b", 0.2, Strategy::SelfHealSignature, 9);

  return episodes;
}

}  // namespace vforge::test

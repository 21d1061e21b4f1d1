#pragma once

#include "vforge/corpus.hpp"
#include "vforge/functional.hpp"
#include "vforge/generation.hpp"
#include "vforge/prompts.hpp"
#include "vforge/verification.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vforge {

/// One generation-plus-verification step of an episode.
struct Round {
  int index = 0;
  PromptText prompt;  // the message(s) this round added to the conversation
  std::string raw_response;
  std::optional<std::string> extracted;   // absent on extraction failure and
                                          // on rounds where no response came back
  std::optional<VerifierReport> report;   // absent when the verifier never ran
  OutcomeCategory category = OutcomeCategory::ToolError;
  std::chrono::milliseconds gen_latency{0};
  std::chrono::milliseconds verify_latency{0};
};

/// One attempt chain for a (problem, model, temperature, strategy) cell.
struct Episode {
  std::string problem_id;
  std::string model;
  double temperature = 0.0;
  Strategy strategy = Strategy::Contextless;
  int attempt = 0;
  std::vector<Round> rounds;
  OutcomeCategory final = OutcomeCategory::ToolError;
  std::optional<FunctionalReport> functional;
  std::optional<bool> weak_spec;  // set on verified episodes
  std::chrono::milliseconds duration{0};
};

struct EpisodeConfig {
  std::string model;
  double temperature = 0.0;
  Strategy strategy = Strategy::Contextless;
  int attempt = 0;
  int max_repairs = 10;
  std::chrono::milliseconds llm_timeout{180000};
  std::chrono::milliseconds verify_timeout{120000};
  std::chrono::milliseconds case_timeout{10000};
  std::filesystem::path artifacts_dir;  // empty = keep nothing
};

/// System + first user message for a strategy's round zero.
/// Throws StrategyRequiresSignatureError.
std::vector<Message> initial_messages(const Problem& problem, Strategy strategy);

/// Feedback text embedded into the next repair prompt.
std::string repair_feedback_text(const Round& round);

/// Runs one episode: round zero from the strategy's base prompt, then the
/// bounded verifier-feedback repair loop (self-healing strategies only).
/// Backend errors become Timeout/ToolError rounds, not exceptions.
Episode run_episode(const Problem& problem, Backend& backend,
                    const DafnyTool& dafny, ProgramRunner* runner,
                    const EpisodeConfig& config);

nlohmann::json episode_to_json(const Episode& episode);
Episode episode_from_json(const nlohmann::json& doc);

/// Timing-free rendering used for multiset comparisons across runs.
nlohmann::json episode_canonical_json(const Episode& episode);

std::vector<Episode> load_manifest(const std::filesystem::path& manifest_path);
void append_manifest_line(const std::filesystem::path& manifest_path,
                          const Episode& episode);

struct MatrixConfig {
  std::vector<std::string> models;
  std::vector<double> temps{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<Strategy> strategies;
  int k = 5;
  int jobs = 4;
  int max_repairs = 10;
  std::chrono::milliseconds llm_timeout{180000};
  std::chrono::milliseconds verify_timeout{120000};
  std::chrono::milliseconds case_timeout{10000};
  std::filesystem::path out_dir;
};

struct MatrixResult {
  std::vector<Episode> episodes;  // existing + newly run
  int new_episodes = 0;
  int resumed = 0;  // requested episodes already present in the manifest
};

using EpisodeProgress = std::function<void(const Episode&, int done, int total)>;
using MatrixLog = std::function<void(const std::string&)>;

/// k independent episodes per (problem, model, temperature, strategy) cell on
/// a bounded worker pool; cells already complete in the manifest are skipped.
MatrixResult run_matrix(const Corpus& corpus, Backend& backend,
                        const DafnyTool& dafny, const MatrixConfig& config,
                        const EpisodeProgress& progress = {},
                        const MatrixLog& log = {});

}  // namespace vforge

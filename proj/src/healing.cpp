#include "vforge/healing.hpp"

#include "vforge/errors.hpp"
#include "vforge/util.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace vforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Message> initial_messages(const Problem& problem, Strategy strategy) {
  if (strategy_uses_signature(strategy) && !problem.signature) {
    throw StrategyRequiresSignatureError(
        "strategy " + std::string(strategy_name(strategy)) +
        " requires a method signature, problem " + problem.id + " has none");
  }
  const PromptText prompt = strategy_uses_signature(strategy)
                                ? render_signature(problem)
                                : render_contextless(problem);
  return {{"system", prompt.system}, {"user", prompt.user}};
}

std::string repair_feedback_text(const Round& round) {
  if (!round.report) {
    return "No Dafny code block was found in the previous response.";
  }
  std::string text = round.report->stdout_text;
  if (!trim(round.report->stderr_text).empty()) {
    if (!text.empty() && text.back() != '\n') text += '\n';
    text += round.report->stderr_text;
  }
  if (round.report->timed_out) {
    if (!text.empty() && text.back() != '\n') text += '\n';
    text += "The Dafny verifier timed out.";
  }
  if (trim(text).empty()) {
    text = "The Dafny verifier produced no output (exit code " +
           std::to_string(round.report->exit_code) + ").";
  }
  return text;
}

namespace {

void write_round_artifacts(const fs::path& dir, const Round& round) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string stem = "round-" + std::to_string(round.index);
  write_file(dir / (stem + "-response.txt"), round.raw_response);
  if (round.extracted) {
    write_file(dir / (stem + ".dfy"), *round.extracted);
  }
}

}  // namespace

Episode run_episode(const Problem& problem, Backend& backend,
                    const DafnyTool& dafny, ProgramRunner* runner,
                    const EpisodeConfig& config) {
  const auto started = std::chrono::steady_clock::now();

  Episode episode;
  episode.problem_id = problem.id;
  episode.model = config.model;
  episode.temperature = config.temperature;
  episode.strategy = config.strategy;
  episode.attempt = config.attempt;

  std::vector<Message> conversation = initial_messages(problem, config.strategy);
  PromptText current_prompt{conversation[0].content, conversation[1].content};

  const int max_rounds = strategy_self_heals(config.strategy) ? config.max_repairs + 1 : 1;
  int consecutive_extraction_failures = 0;

  for (int index = 0; index < max_rounds; ++index) {
    Round round;
    round.index = index;
    round.prompt = current_prompt;

    GenerationRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.messages = conversation;
    request.timeout = config.llm_timeout;

    bool backend_failed = false;
    try {
      const GenerationResponse response = backend.complete(request);
      round.raw_response = response.raw_text;
      round.gen_latency = response.latency;
    } catch (const TimeoutError&) {
      round.category = OutcomeCategory::Timeout;
      backend_failed = true;
    } catch (const Error&) {
      round.category = OutcomeCategory::ToolError;
      backend_failed = true;
    }
    if (backend_failed) {
      episode.rounds.push_back(std::move(round));
      break;  // recorded as a failure for this trial
    }

    round.extracted = extract_code(round.raw_response);
    if (!round.extracted) {
      round.category = OutcomeCategory::ExtractionFailure;
      ++consecutive_extraction_failures;
    } else {
      consecutive_extraction_failures = 0;
      const fs::path retain_dir =
          config.artifacts_dir.empty()
              ? fs::path{}
              : config.artifacts_dir / ("round-" + std::to_string(index));
      try {
        VerifyLimits limits;
        limits.timeout = config.verify_timeout;
        VerifierReport report = dafny.verify(*round.extracted, limits, retain_dir);
        round.verify_latency = report.wall_time;
        round.category = classify(report, true);
        round.report = std::move(report);
      } catch (const Error&) {
        round.category = OutcomeCategory::ToolError;
      }
    }
    write_round_artifacts(config.artifacts_dir, round);
    episode.rounds.push_back(round);

    if (round.category == OutcomeCategory::Verified) break;
    if (round.category == OutcomeCategory::ToolError && !round.report) break;
    if (consecutive_extraction_failures >= 2) break;
    if (!strategy_self_heals(config.strategy)) break;
    if (index + 1 >= max_rounds) break;

    const PromptText repair =
        render_repair(round.extracted.value_or(""), repair_feedback_text(round));
    conversation.push_back({"assistant", round.raw_response});
    conversation.push_back({"user", repair.user});
    current_prompt = repair;
  }

  episode.final = episode.rounds.back().category;

  if (episode.final == OutcomeCategory::Verified) {
    const std::string& source = *episode.rounds.back().extracted;
    episode.weak_spec = has_weak_specification(source);
    if (runner && !problem.tests.empty()) {
      RunLimits limits;
      limits.case_timeout = config.case_timeout;
      episode.functional = runner->run_suite(source, problem.tests, limits);
    }
  }

  episode.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return episode;
}

namespace {

json diagnostic_to_json(const Diagnostic& diag) {
  return json{
      {"file", diag.file},
      {"line", diag.line ? json(*diag.line) : json(nullptr)},
      {"col", diag.column ? json(*diag.column) : json(nullptr)},
      {"severity", diag.severity == Severity::Warning ? "warning" : "error"},
      {"message", diag.message},
      {"phase", diag.phase == PhaseHint::Parse     ? "parse"
                : diag.phase == PhaseHint::Resolve ? "resolve"
                : diag.phase == PhaseHint::Verify  ? "verify"
                                                   : "unknown"},
  };
}

Diagnostic diagnostic_from_json(const json& doc) {
  Diagnostic diag;
  diag.file = doc.value("file", std::string{});
  if (doc.contains("line") && !doc.at("line").is_null()) diag.line = doc.at("line").get<int>();
  if (doc.contains("col") && !doc.at("col").is_null()) diag.column = doc.at("col").get<int>();
  diag.severity =
      doc.value("severity", std::string{"error"}) == "warning" ? Severity::Warning
                                                               : Severity::Error;
  diag.message = doc.value("message", std::string{});
  const std::string phase = doc.value("phase", std::string{"unknown"});
  diag.phase = phase == "parse"     ? PhaseHint::Parse
               : phase == "resolve" ? PhaseHint::Resolve
               : phase == "verify"  ? PhaseHint::Verify
                                    : PhaseHint::Unknown;
  return diag;
}

json round_to_json(const Round& round) {
  json doc{
      {"index", round.index},
      {"prompt", {{"system", round.prompt.system}, {"user", round.prompt.user}}},
      {"raw_response", round.raw_response},
      {"extracted", round.extracted ? json(*round.extracted) : json(nullptr)},
      {"category", category_name(round.category)},
      {"gen_ms", round.gen_latency.count()},
      {"verify_ms", round.verify_latency.count()},
  };
  if (round.report) {
    json diags = json::array();
    for (const auto& diag : round.report->diagnostics) {
      diags.push_back(diagnostic_to_json(diag));
    }
    doc["verifier"] = json{
        {"exit_code", round.report->exit_code},
        {"verified", round.report->verified},
        {"timed_out", round.report->timed_out},
        {"diagnostics", std::move(diags)},
        {"wall_ms", round.report->wall_time.count()},
    };
  } else {
    doc["verifier"] = nullptr;
  }
  return doc;
}

Round round_from_json(const json& doc) {
  Round round;
  round.index = doc.value("index", 0);
  if (doc.contains("prompt")) {
    round.prompt.system = doc.at("prompt").value("system", std::string{});
    round.prompt.user = doc.at("prompt").value("user", std::string{});
  }
  round.raw_response = doc.value("raw_response", std::string{});
  if (doc.contains("extracted") && !doc.at("extracted").is_null()) {
    round.extracted = doc.at("extracted").get<std::string>();
  }
  round.category = category_from_name(doc.value("category", std::string{"tool_error"}));
  round.gen_latency = std::chrono::milliseconds(doc.value("gen_ms", 0LL));
  round.verify_latency = std::chrono::milliseconds(doc.value("verify_ms", 0LL));
  if (doc.contains("verifier") && !doc.at("verifier").is_null()) {
    const json& v = doc.at("verifier");
    VerifierReport report;
    report.exit_code = v.value("exit_code", -1);
    report.verified = v.value("verified", false);
    report.timed_out = v.value("timed_out", false);
    report.wall_time = std::chrono::milliseconds(v.value("wall_ms", 0LL));
    for (const auto& d : v.value("diagnostics", json::array())) {
      report.diagnostics.push_back(diagnostic_from_json(d));
    }
    round.report = std::move(report);
  }
  return round;
}

json functional_to_json(const FunctionalReport& report) {
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back(json{
        {"case", v.case_index},
        {"verdict", verdict_name(v.verdict)},
        {"diff", v.diff_summary},
    });
  }
  return json{{"passed", report.passed}, {"verdicts", std::move(verdicts)}};
}

FunctionalReport functional_from_json(const json& doc) {
  FunctionalReport report;
  report.passed = doc.value("passed", false);
  for (const auto& v : doc.value("verdicts", json::array())) {
    CaseVerdict verdict;
    verdict.case_index = v.value("case", 0);
    const std::string name = v.value("verdict", std::string{"runtime_error"});
    verdict.verdict = name == "pass"           ? Verdict::Pass
                      : name == "wrong_answer" ? Verdict::WrongAnswer
                      : name == "time_limit"   ? Verdict::TimeLimit
                                               : Verdict::RuntimeError;
    verdict.diff_summary = v.value("diff", std::string{});
    report.verdicts.push_back(std::move(verdict));
  }
  return report;
}

void strip_timings(json& doc) {
  if (doc.is_object()) {
    for (const char* key : {"gen_ms", "verify_ms", "wall_ms", "duration_ms"}) {
      doc.erase(key);
    }
    for (auto& [_, value] : doc.items()) strip_timings(value);
  } else if (doc.is_array()) {
    for (auto& value : doc) strip_timings(value);
  }
}

}  // namespace

json episode_to_json(const Episode& episode) {
  json rounds = json::array();
  for (const auto& round : episode.rounds) {
    rounds.push_back(round_to_json(round));
  }
  return json{
      {"problem_id", episode.problem_id},
      {"model", episode.model},
      {"temperature", episode.temperature},
      {"strategy", strategy_name(episode.strategy)},
      {"attempt", episode.attempt},
      {"rounds", std::move(rounds)},
      {"final", category_name(episode.final)},
      {"functional",
       episode.functional ? functional_to_json(*episode.functional) : json(nullptr)},
      {"weak_spec", episode.weak_spec ? json(*episode.weak_spec) : json(nullptr)},
      {"duration_ms", episode.duration.count()},
  };
}

Episode episode_from_json(const json& doc) {
  Episode episode;
  episode.problem_id = doc.at("problem_id").get<std::string>();
  episode.model = doc.at("model").get<std::string>();
  episode.temperature = doc.at("temperature").get<double>();
  episode.strategy = strategy_from_name(doc.at("strategy").get<std::string>());
  episode.attempt = doc.value("attempt", 0);
  for (const auto& r : doc.value("rounds", json::array())) {
    episode.rounds.push_back(round_from_json(r));
  }
  episode.final = category_from_name(doc.value("final", std::string{"tool_error"}));
  if (doc.contains("functional") && !doc.at("functional").is_null()) {
    episode.functional = functional_from_json(doc.at("functional"));
  }
  if (doc.contains("weak_spec") && !doc.at("weak_spec").is_null()) {
    episode.weak_spec = doc.at("weak_spec").get<bool>();
  }
  episode.duration = std::chrono::milliseconds(doc.value("duration_ms", 0LL));
  return episode;
}

json episode_canonical_json(const Episode& episode) {
  json doc = episode_to_json(episode);
  strip_timings(doc);
  return doc;
}

std::vector<Episode> load_manifest(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) {
    throw MissingPathError("manifest not found: " + manifest_path.string());
  }
  std::ifstream in(manifest_path);
  std::vector<Episode> episodes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      episodes.push_back(episode_from_json(json::parse(line)));
    } catch (const std::exception& ex) {
      throw IoError("bad manifest line " + std::to_string(line_no) + " in " +
                    manifest_path.string() + ": " + ex.what());
    }
  }
  return episodes;
}

void append_manifest_line(const fs::path& manifest_path, const Episode& episode) {
  std::ofstream out(manifest_path, std::ios::app | std::ios::binary);
  if (!out) {
    throw IoError("cannot append to manifest: " + manifest_path.string());
  }
  out << episode_to_json(episode).dump() << '\n';
}

namespace {

std::string sanitize_component(const std::string& text) {
  std::string out;
  for (char c : text) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
            c == '_')
               ? c
               : '_';
  }
  return out;
}

struct CellTask {
  const Problem* problem;
  std::string model;
  double temperature;
  Strategy strategy;
  int attempt;
};

std::string cell_key(const std::string& problem_id, const std::string& model,
                     double temperature, Strategy strategy, int attempt) {
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.6g", temperature);
  return problem_id + "\x1f" + model + "\x1f" + temp + "\x1f" +
         strategy_name(strategy) + "\x1f" + std::to_string(attempt);
}

}  // namespace

MatrixResult run_matrix(const Corpus& corpus, Backend& backend,
                        const DafnyTool& dafny, const MatrixConfig& config,
                        const EpisodeProgress& progress, const MatrixLog& log) {
  if (config.k < 1) throw ConfigError("k must be >= 1");
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");

  fs::create_directories(config.out_dir);
  const fs::path manifest_path = config.out_dir / "manifest.jsonl";

  MatrixResult result;
  std::set<std::string> done;
  if (fs::exists(manifest_path)) {
    result.episodes = load_manifest(manifest_path);
    for (const auto& episode : result.episodes) {
      done.insert(cell_key(episode.problem_id, episode.model, episode.temperature,
                           episode.strategy, episode.attempt));
    }
  }

  std::vector<CellTask> tasks;
  for (const Problem& problem : corpus) {
    for (const std::string& model : config.models) {
      for (double temperature : config.temps) {
        for (Strategy strategy : config.strategies) {
          if (strategy_uses_signature(strategy) && !problem.signature) {
            if (log) {
              log("skipping " + problem.id + " for strategy " +
                  strategy_name(strategy) + ": no method signature");
            }
            continue;
          }
          for (int attempt = 0; attempt < config.k; ++attempt) {
            if (done.count(cell_key(problem.id, model, temperature, strategy,
                                    attempt))) {
              ++result.resumed;
              continue;
            }
            tasks.push_back({&problem, model, temperature, strategy, attempt});
          }
        }
      }
    }
  }

  ProgramRunner runner(dafny, config.out_dir / "build-cache");

  std::mutex writer_mutex;
  std::atomic<std::size_t> next_task{0};
  std::atomic<int> completed{0};
  std::exception_ptr first_failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t index = next_task.fetch_add(1);
      if (index >= tasks.size()) return;
      const CellTask& task = tasks[index];

      char temp[32];
      std::snprintf(temp, sizeof(temp), "%.6g", task.temperature);
      const fs::path artifacts =
          config.out_dir / "episodes" /
          (sanitize_component(task.problem->id) + "__" +
           sanitize_component(task.model) + "__T" + temp + "__" +
           strategy_name(task.strategy)) /
          ("attempt-" + std::to_string(task.attempt));

      EpisodeConfig episode_config;
      episode_config.model = task.model;
      episode_config.temperature = task.temperature;
      episode_config.strategy = task.strategy;
      episode_config.attempt = task.attempt;
      episode_config.max_repairs = config.max_repairs;
      episode_config.llm_timeout = config.llm_timeout;
      episode_config.verify_timeout = config.verify_timeout;
      episode_config.case_timeout = config.case_timeout;
      episode_config.artifacts_dir = artifacts;

      try {
        Episode episode =
            run_episode(*task.problem, backend, dafny, &runner, episode_config);
        std::lock_guard guard(writer_mutex);
        append_manifest_line(manifest_path, episode);
        ++result.new_episodes;
        if (progress) {
          progress(episode, ++completed, static_cast<int>(tasks.size()));
        }
        result.episodes.push_back(std::move(episode));
      } catch (...) {
        std::lock_guard guard(writer_mutex);
        if (!first_failure) first_failure = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int jobs = std::min<int>(config.jobs, std::max<std::size_t>(tasks.size(), 1));
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();

  if (first_failure) std::rethrow_exception(first_failure);
  return result;
}

}  // namespace vforge

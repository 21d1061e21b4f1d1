#include "vforge/corpus.hpp"
#include "vforge/errors.hpp"
#include "vforge/generation.hpp"
#include "vforge/healing.hpp"
#include "vforge/metrics.hpp"
#include "vforge/prompts.hpp"
#include "vforge/util.hpp"
#include "vforge/verification.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace vforge;

namespace {

struct RunArgs {
  std::string corpus_path;
  std::string out_dir;
  std::vector<std::string> models;
  std::vector<double> temps{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<std::string> strategies;
  int k = 5;
  int max_repairs = 10;
  int llm_timeout_secs = 180;
  int verify_timeout_secs = 120;
  int case_timeout_secs = 10;
  int jobs = 4;
  std::string endpoint;
  std::string replay_dir;
  std::string dafny_path;
};

int cmd_run(const RunArgs& args) {
  if (args.endpoint.empty() == args.replay_dir.empty()) {
    throw ConfigError("exactly one of --endpoint and --replay must be set");
  }
  for (double t : args.temps) {
    if (t < 0.0 || t > 1.0) throw ConfigError("temperatures must lie in [0,1]");
  }

  MatrixConfig config;
  config.models = args.models;
  config.temps = args.temps;
  for (const std::string& name : args.strategies) {
    config.strategies.push_back(strategy_from_name(name));
  }
  if (config.models.empty()) throw ConfigError("at least one --models entry required");
  if (config.strategies.empty()) throw ConfigError("at least one --strategy required");
  config.k = args.k;
  config.jobs = args.jobs;
  config.max_repairs = args.max_repairs;
  config.llm_timeout = std::chrono::seconds(args.llm_timeout_secs);
  config.verify_timeout = std::chrono::seconds(args.verify_timeout_secs);
  config.case_timeout = std::chrono::seconds(args.case_timeout_secs);
  config.out_dir = args.out_dir;

  const Corpus corpus = load_corpus(args.corpus_path);
  const DafnyTool dafny = DafnyTool::resolve(args.dafny_path);

  std::unique_ptr<Backend> backend;
  if (!args.replay_dir.empty()) {
    backend = std::make_unique<ReplayStore>(args.replay_dir);
  } else {
    backend = std::make_unique<HttpBackend>(HttpBackendOptions{args.endpoint, 1});
  }

  auto progress = [](const Episode& episode, int done, int total) {
    std::cerr << "[" << done << "/" << total << "] " << episode.problem_id
              << " model=" << episode.model
              << " T=" << format_temperature(episode.temperature)
              << " strategy=" << strategy_name(episode.strategy)
              << " attempt=" << episode.attempt << " -> "
              << category_name(episode.final)
              << " (rounds=" << episode.rounds.size();
    if (episode.functional) {
      std::cerr << ", functional=" << (episode.functional->passed ? "pass" : "fail");
    }
    if (episode.weak_spec && *episode.weak_spec) {
      std::cerr << ", weak-spec";
    }
    std::cerr << ", " << episode.duration.count() << "ms)\n";
  };
  auto log = [](const std::string& message) { std::cerr << message << "\n"; };

  const MatrixResult result =
      run_matrix(corpus, *backend, dafny, config, progress, log);
  std::cerr << result.new_episodes << " new episodes (" << result.resumed
            << " already in manifest)\n";
  std::cout << (config.out_dir / "manifest.jsonl").string() << "\n";
  return 0;
}

int cmd_report(const std::string& manifest_path, const std::string& out_dir,
               const std::string& format_name) {
  ReportFormat format = ReportFormat::Both;
  if (format_name == "markdown") format = ReportFormat::Markdown;
  else if (format_name == "csv") format = ReportFormat::Csv;
  else if (format_name != "both") throw ConfigError("unknown --format: " + format_name);

  const std::vector<Episode> episodes = load_manifest(manifest_path);
  const fs::path dir =
      out_dir.empty() ? fs::path(manifest_path).parent_path() : fs::path(out_dir);
  for (const fs::path& file : emit_report(episodes, dir, format)) {
    std::cout << file.string() << "\n";
  }
  return 0;
}

int cmd_classify(const std::string& raw_output_file, int exit_code, bool timed_out) {
  VerifierReport report;
  report.exit_code = exit_code;
  report.stdout_text = read_file(raw_output_file);
  report.timed_out = timed_out;
  report.diagnostics = parse_diagnostics(report.stdout_text, "", exit_code);

  bool any_error = false;
  for (const auto& diag : report.diagnostics) {
    if (diag.severity == Severity::Error) any_error = true;
  }
  // Captured files may predate the summary line; with exit 0, no error
  // diagnostics and no timeout we take the run as verified.
  report.verified = !timed_out && exit_code == 0 && !any_error &&
                    (success_summary_present(report.stdout_text) ||
                     trim(report.stdout_text).empty());

  for (const auto& diag : report.diagnostics) {
    std::cout << (diag.file.empty() ? "<no location>" : diag.file);
    if (diag.line) std::cout << "(" << *diag.line << "," << diag.column.value_or(0) << ")";
    std::cout << " [" << (diag.severity == Severity::Warning ? "warning" : "error")
              << "/"
              << (diag.phase == PhaseHint::Parse     ? "parse"
                  : diag.phase == PhaseHint::Resolve ? "resolve"
                  : diag.phase == PhaseHint::Verify  ? "verify"
                                                     : "unknown")
              << "] " << diag.message << "\n";
  }
  std::cout << "category: " << category_name(classify(report, true)) << "\n";
  return 0;
}

int cmd_validate(const std::string& corpus_path) {
  if (!fs::is_directory(corpus_path)) {
    throw MissingPathError("corpus directory not found: " + corpus_path);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  int violations = 0;
  std::map<std::string, std::string> ids;  // id -> file
  for (const fs::path& file : files) {
    try {
      const nlohmann::json doc = nlohmann::json::parse(read_file(file));
      const Problem problem = problem_from_json(doc, file.string());
      if (file.filename() != problem.id + ".json") {
        std::cout << file.string() << ": id: file name must be <id>.json\n";
        ++violations;
      }
      auto [it, inserted] = ids.emplace(problem.id, file.string());
      if (!inserted) {
        std::cout << file.string() << ": id: duplicate of " << it->second << "\n";
        ++violations;
      }
      for (const auto& issue : validate_problem(problem)) {
        std::cout << file.string() << ": " << issue.field << ": " << issue.rule << "\n";
        ++violations;
      }
      if (!problem.signature) {
        std::cout << file.string()
                  << ": note: no method signature (contextless strategies only)\n";
      }
    } catch (const MalformedProblemError& ex) {
      std::cout << ex.file << ": " << ex.reason << "\n";
      ++violations;
    }
  }
  std::cout << files.size() << " problems, " << violations << " violations\n";
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch synthesis and verification harness for Dafny programs"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run the synthesis matrix");
  run->add_option("--corpus", run_args.corpus_path, "Problem corpus directory")
      ->required();
  run->add_option("--out", run_args.out_dir, "Run output directory")->required();
  run->add_option("--models", run_args.models, "Model identifiers")
      ->required()
      ->delimiter(',');
  run->add_option("--temps", run_args.temps,
                  "Sampling temperatures (default 0.0 0.2 0.4 0.6 0.8)")
      ->delimiter(',');
  run->add_option("--strategy", run_args.strategies,
                  "contextless | signature | self-heal-contextless | "
                  "self-heal-signature (repeatable)")
      ->required();
  run->add_option("--k", run_args.k, "Attempts per cell (default 5)");
  run->add_option("--max-repairs", run_args.max_repairs,
                  "Repair rounds per episode (default 10)");
  run->add_option("--llm-timeout-secs", run_args.llm_timeout_secs,
                  "Model response wait (default 180)");
  run->add_option("--verify-timeout-secs", run_args.verify_timeout_secs,
                  "Verifier timeout per file (default 120)");
  run->add_option("--case-timeout-secs", run_args.case_timeout_secs,
                  "Run timeout per test case (default 10)");
  run->add_option("--jobs", run_args.jobs, "Parallel episodes (default 4)");
  run->add_option("--endpoint", run_args.endpoint,
                  "Chat-completions base URL (env: VFORGE_ENDPOINT)")
      ->envname("VFORGE_ENDPOINT");
  run->add_option("--replay", run_args.replay_dir,
                  "Replay store directory (deterministic backend)");
  run->add_option("--dafny-path", run_args.dafny_path,
                  "Dafny binary (env: VFORGE_DAFNY, else PATH)");

  std::string manifest_path, report_out, format_name = "both";
  CLI::App* report = app.add_subcommand("report", "Aggregate a run manifest");
  report->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();
  report->add_option("--out", report_out, "Output directory (default: manifest dir)");
  report->add_option("--format", format_name, "markdown | csv | both");

  std::string classify_file;
  int classify_exit = 0;
  bool classify_timeout = false;
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "Classify a captured verifier output file");
  classify_cmd->add_option("file", classify_file, "Captured verifier output")
      ->required();
  classify_cmd->add_option("--exit-code", classify_exit,
                           "Verifier exit code metadata (default 0)");
  classify_cmd->add_flag("--timed-out", classify_timeout,
                         "Treat the run as timed out");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Validate a problem corpus");
  validate->add_option("--corpus", validate_path, "Problem corpus directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(manifest_path, report_out, format_name);
    if (classify_cmd->parsed())
      return cmd_classify(classify_file, classify_exit, classify_timeout);
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

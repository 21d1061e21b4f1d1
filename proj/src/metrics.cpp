#include "vforge/metrics.hpp"

#include "vforge/errors.hpp"
#include "vforge/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

namespace vforge {

namespace fs = std::filesystem;

std::vector<CellOutcome> collect_cells(const std::vector<Episode>& episodes) {
  struct Key {
    std::string model;
    std::string temp;
    int strategy;
    std::string problem;
    bool operator<(const Key& other) const {
      return std::tie(model, temp, strategy, problem) <
             std::tie(other.model, other.temp, other.strategy, other.problem);
    }
  };

  std::map<Key, std::map<int, bool>> grouped;
  std::map<Key, double> temps;
  for (const Episode& episode : episodes) {
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.6g", episode.temperature);
    Key key{episode.model, temp, static_cast<int>(episode.strategy),
            episode.problem_id};
    grouped[key][episode.attempt] = episode.final == OutcomeCategory::Verified;
    temps[key] = episode.temperature;
  }

  std::vector<CellOutcome> cells;
  for (const auto& [key, by_attempt] : grouped) {
    CellOutcome cell;
    cell.problem_id = key.problem;
    cell.model = key.model;
    cell.temperature = temps[key];
    cell.strategy = static_cast<Strategy>(key.strategy);
    for (const auto& [_, verified] : by_attempt) {
      cell.attempts.push_back(verified);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

VerifyRate verify_at_k_empirical(const std::vector<CellOutcome>& cells, int k) {
  if (k < 1) throw DomainError("verify@k requires k >= 1");
  VerifyRate rate;
  rate.total = static_cast<int>(cells.size());
  for (const CellOutcome& cell : cells) {
    if (static_cast<int>(cell.attempts.size()) < k) {
      throw InsufficientAttemptsError(cell.problem_id + "/" + cell.model,
                                      static_cast<int>(cell.attempts.size()), k);
    }
    for (int i = 0; i < k; ++i) {
      if (cell.attempts[static_cast<std::size_t>(i)]) {
        ++rate.success;
        break;
      }
    }
  }
  return rate;
}

double verify_at_k_unbiased(int n, int c, int k) {
  if (c < 0 || c > n || k < 1 || k > n) {
    throw DomainError("verify_at_k_unbiased requires 0 <= c <= n and 1 <= k <= n");
  }
  if (n - c < k) return 1.0;
  double failure = 1.0;
  for (int i = 0; i < k; ++i) {
    failure *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - failure;
}

double verify_at_k_unbiased_mean(const std::vector<CellOutcome>& cells, int k) {
  if (cells.empty()) throw DomainError("unbiased mean needs at least one cell");
  double sum = 0.0;
  for (const CellOutcome& cell : cells) {
    const int n = static_cast<int>(cell.attempts.size());
    int c = 0;
    for (bool verified : cell.attempts) c += verified ? 1 : 0;
    sum += verify_at_k_unbiased(n, c, k);
  }
  return sum / static_cast<double>(cells.size());
}

std::map<TaxonomyKey, TaxonomyCounts> error_distribution(
    const std::vector<Episode>& episodes) {
  std::map<TaxonomyKey, TaxonomyCounts> distribution;
  for (const Episode& episode : episodes) {
    TaxonomyCounts& counts = distribution[{episode.model, episode.strategy}];
    for (const Round& round : episode.rounds) {
      ++counts.total_runs;
      switch (round.category) {
        case OutcomeCategory::SyntaxError: ++counts.syntax; break;
        case OutcomeCategory::SemanticTypeError: ++counts.semantic_type; break;
        case OutcomeCategory::VerificationError: ++counts.verification; break;
        case OutcomeCategory::Verified: ++counts.verified; break;
        case OutcomeCategory::ExtractionFailure: ++counts.extraction_failure; break;
        case OutcomeCategory::Timeout: ++counts.timeout; break;
        case OutcomeCategory::ToolError: ++counts.tool_error; break;
      }
    }
  }
  return distribution;
}

namespace {

constexpr int kReportableKs[] = {1, 3, 5};

struct SummaryRow {
  Strategy strategy;
  std::string model;
  double temperature;
  int min_attempts;
  std::map<int, VerifyRate> by_k;
  std::map<int, double> unbiased_by_k;
};

// Half-up percent rendering of a fraction, e.g. 0.10909 -> "10.91".
std::string format_fraction_percent(double fraction) {
  const long long hundredths = std::llround(fraction * 10000.0);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", hundredths / 100,
                hundredths % 100);
  return buf;
}

std::vector<SummaryRow> build_summary_rows(const std::vector<CellOutcome>& cells) {
  struct GroupKey {
    int strategy;
    std::string model;
    std::string temp;
    bool operator<(const GroupKey& other) const {
      return std::tie(strategy, model, temp) <
             std::tie(other.strategy, other.model, other.temp);
    }
  };
  std::map<GroupKey, std::vector<CellOutcome>> groups;
  for (const CellOutcome& cell : cells) {
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.6g", cell.temperature);
    groups[{static_cast<int>(cell.strategy), cell.model, temp}].push_back(cell);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.strategy = static_cast<Strategy>(key.strategy);
    row.model = key.model;
    row.temperature = group.front().temperature;
    row.min_attempts = static_cast<int>(group.front().attempts.size());
    for (const CellOutcome& cell : group) {
      row.min_attempts =
          std::min(row.min_attempts, static_cast<int>(cell.attempts.size()));
    }
    for (int k : kReportableKs) {
      if (k <= row.min_attempts) {
        row.by_k[k] = verify_at_k_empirical(group, k);
        row.unbiased_by_k[k] = verify_at_k_unbiased_mean(group, k);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;  // map iteration already gives (strategy, model, temp) order
}

/// Ks available in every row of one strategy section; k=1 is always present.
std::vector<int> section_ks(const std::vector<const SummaryRow*>& rows) {
  std::vector<int> ks;
  for (int k : kReportableKs) {
    bool everywhere = !rows.empty();
    for (const SummaryRow* row : rows) {
      if (!row->by_k.count(k)) everywhere = false;
    }
    if (everywhere) ks.push_back(k);
  }
  return ks;
}

std::string rate_cell(const VerifyRate& rate) {
  return std::to_string(rate.success) + "/" + std::to_string(rate.total) + " (" +
         format_percent(rate.success, rate.total) + "%)";
}

}  // namespace

ReportBundle render_reports(const std::vector<Episode>& episodes) {
  const std::vector<CellOutcome> cells = collect_cells(episodes);
  const std::vector<SummaryRow> rows = build_summary_rows(cells);

  ReportBundle bundle;

  // Markdown carries the primary (empirical) rates; the CSV also gets the
  // unbiased estimator column.
  bundle.summary_md = "# Verification Success Rates\n";
  bundle.summary_csv =
      "strategy,model,temperature,k,success,total,percent,percent_unbiased\n";

  for (Strategy strategy : {Strategy::Contextless, Strategy::Signature,
                            Strategy::SelfHealContextless, Strategy::SelfHealSignature}) {
    std::vector<const SummaryRow*> section;
    for (const SummaryRow& row : rows) {
      if (row.strategy == strategy) section.push_back(&row);
    }
    if (section.empty()) continue;
    const std::vector<int> ks = section_ks(section);

    bundle.summary_md += "\n## Strategy: " + std::string(strategy_name(strategy)) +
                         "\n\n| Model | Temp |";
    for (int k : ks) bundle.summary_md += " verify@" + std::to_string(k) + " |";
    bundle.summary_md += "\n|---|---|";
    for (std::size_t i = 0; i < ks.size(); ++i) bundle.summary_md += "---|";
    bundle.summary_md += "\n";

    for (const SummaryRow* row : section) {
      const std::string temp = format_temperature(row->temperature);
      bundle.summary_md += "| " + row->model + " | " + temp + " |";
      for (int k : ks) {
        const VerifyRate& rate = row->by_k.at(k);
        bundle.summary_md += " " + rate_cell(rate) + " |";
        bundle.summary_csv += std::string(strategy_name(strategy)) + "," + row->model +
                              "," + temp + "," + std::to_string(k) + "," +
                              std::to_string(rate.success) + "," +
                              std::to_string(rate.total) + "," +
                              format_percent(rate.success, rate.total) + "," +
                              format_fraction_percent(row->unbiased_by_k.at(k)) +
                              "\n";
      }
      bundle.summary_md += "\n";
    }
  }

  bundle.errors_md =
      "# Outcome Distribution by Round\n\n"
      "| Model | Strategy | Total Runs | Syntax Errors | Semantic/Type Errors | "
      "Verification | Verified | Extraction Failures | Timeouts | Tool Errors |\n"
      "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& [key, counts] : error_distribution(episodes)) {
    bundle.errors_md += "| " + key.model + " | " + strategy_name(key.strategy) +
                        " | " + std::to_string(counts.total_runs) + " | " +
                        std::to_string(counts.syntax) + " | " +
                        std::to_string(counts.semantic_type) + " | " +
                        std::to_string(counts.verification) + " | " +
                        std::to_string(counts.verified) + " | " +
                        std::to_string(counts.extraction_failure) + " | " +
                        std::to_string(counts.timeout) + " | " +
                        std::to_string(counts.tool_error) + " |\n";
  }

  return bundle;
}

std::vector<fs::path> emit_report(const std::vector<Episode>& episodes,
                                  const fs::path& out_dir, ReportFormat format) {
  const ReportBundle bundle = render_reports(episodes);
  fs::create_directories(out_dir);

  std::vector<fs::path> written;
  auto emit = [&](const char* name, const std::string& content) {
    const fs::path path = out_dir / name;
    write_file(path, content);
    written.push_back(path);
  };

  if (format == ReportFormat::Markdown || format == ReportFormat::Both) {
    emit("summary.md", bundle.summary_md);
    emit("errors.md", bundle.errors_md);
  }
  if (format == ReportFormat::Csv || format == ReportFormat::Both) {
    emit("summary.csv", bundle.summary_csv);
  }
  return written;
}

}  // namespace vforge

#pragma once

#include "vforge/healing.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vforge {

/// Ordered attempt results for one (problem, model, temperature, strategy).
struct CellOutcome {
  std::string problem_id;
  std::string model;
  double temperature = 0.0;
  Strategy strategy = Strategy::Contextless;
  std::vector<bool> attempts;  // attempt i verified or not
};

std::vector<CellOutcome> collect_cells(const std::vector<Episode>& episodes);

struct VerifyRate {
  int success = 0;
  int total = 0;
};

/// Problems whose first k attempts contain at least one success.
/// Precondition: every cell has n >= k attempts (InsufficientAttemptsError).
VerifyRate verify_at_k_empirical(const std::vector<CellOutcome>& cells, int k);

/// 1 - C(n-c, k)/C(n, k) in the numerically stable product form.
/// Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double verify_at_k_unbiased(int n, int c, int k);

/// Mean of the unbiased estimator over a group of cells (one per problem).
double verify_at_k_unbiased_mean(const std::vector<CellOutcome>& cells, int k);

struct TaxonomyCounts {
  long long total_runs = 0;
  long long syntax = 0;
  long long semantic_type = 0;
  long long verification = 0;
  long long verified = 0;
  long long extraction_failure = 0;
  long long timeout = 0;
  long long tool_error = 0;
};

struct TaxonomyKey {
  std::string model;
  Strategy strategy = Strategy::Contextless;

  friend bool operator<(const TaxonomyKey& a, const TaxonomyKey& b) {
    if (a.model != b.model) return a.model < b.model;
    return static_cast<int>(a.strategy) < static_cast<int>(b.strategy);
  }
};

/// Tallies every Round (not Episode) by outcome category per (model, strategy).
std::map<TaxonomyKey, TaxonomyCounts> error_distribution(
    const std::vector<Episode>& episodes);

struct ReportBundle {
  std::string summary_md;
  std::string summary_csv;
  std::string errors_md;
};

/// Deterministic bytes for a given episode set: stable row and column order,
/// fixed half-up rounding to two decimals.
ReportBundle render_reports(const std::vector<Episode>& episodes);

enum class ReportFormat { Markdown, Csv, Both };

/// Writes summary.md / errors.md (markdown), summary.csv (csv), or all three.
std::vector<std::filesystem::path> emit_report(const std::vector<Episode>& episodes,
                                               const std::filesystem::path& out_dir,
                                               ReportFormat format);

}  // namespace vforge

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vforge {

struct TestCase {
  std::string input;
  std::string expected_output;
  std::string label;  // empty when absent

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct Problem {
  std::string id;
  std::string title;
  std::string description;
  std::optional<std::string> signature;
  std::vector<std::string> tags;
  std::optional<std::string> source;
  std::vector<TestCase> tests;

  friend bool operator==(const Problem&, const Problem&) = default;
};

using Corpus = std::vector<Problem>;

struct ValidationIssue {
  std::string field;
  std::string rule;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};
using ValidationReport = std::vector<ValidationIssue>;

/// Empty report iff the problem satisfies its invariants. Violations are
/// data, not errors; each names the offending field and the rule.
ValidationReport validate_problem(const Problem& problem);

/// Loads every `<id>.json` in `dir`, sorted by id.
/// Throws MissingPathError, MalformedProblemError, DuplicateIdError.
Corpus load_corpus(const std::filesystem::path& dir);

nlohmann::json problem_to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& doc, const std::string& origin);

}  // namespace vforge

#include "vforge/corpus.hpp"

#include "vforge/errors.hpp"
#include "vforge/util.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace vforge {

namespace fs = std::filesystem;
using nlohmann::json;

ValidationReport validate_problem(const Problem& problem) {
  ValidationReport report;
  if (problem.id.empty()) {
    report.push_back({"id", "must be non-empty"});
  }
  if (problem.description.empty()) {
    report.push_back({"description", "must be non-empty"});
  }
  if (problem.signature) {
    if (trim(*problem.signature).empty()) {
      report.push_back({"signature", "must be non-empty when present"});
    } else if (!contains_word(*problem.signature, "method") &&
               !contains_word(*problem.signature, "function")) {
      report.push_back({"signature", "must contain a 'method' or 'function' token"});
    }
  }
  if (problem.tests.empty()) {
    report.push_back({"tests", "must be non-empty for functional validation"});
  } else {
    const bool any_expected = std::any_of(
        problem.tests.begin(), problem.tests.end(),
        [](const TestCase& t) { return !trim(t.expected_output).empty(); });
    if (!any_expected) {
      report.push_back({"tests", "at least one case needs a non-empty expected output"});
    }
  }
  return report;
}

json problem_to_json(const Problem& problem) {
  json tests = json::array();
  for (const auto& t : problem.tests) {
    json entry = {{"input", t.input}, {"expected_output", t.expected_output}};
    if (!t.label.empty()) entry["label"] = t.label;
    tests.push_back(std::move(entry));
  }
  return json{
      {"id", problem.id},
      {"title", problem.title},
      {"description", problem.description},
      {"signature", problem.signature ? json(*problem.signature) : json(nullptr)},
      {"tags", problem.tags},
      {"source", problem.source ? json(*problem.source) : json(nullptr)},
      {"tests", std::move(tests)},
  };
}

Problem problem_from_json(const json& doc, const std::string& origin) {
  auto fail = [&](const std::string& reason) -> MalformedProblemError {
    return MalformedProblemError(origin, reason);
  };
  if (!doc.is_object()) throw fail("top-level value must be an object");

  Problem p;
  try {
    p.id = doc.at("id").get<std::string>();
    p.title = doc.value("title", std::string{});
    p.description = doc.at("description").get<std::string>();
    if (doc.contains("signature") && !doc.at("signature").is_null()) {
      p.signature = doc.at("signature").get<std::string>();
    }
    if (doc.contains("tags")) {
      p.tags = doc.at("tags").get<std::vector<std::string>>();
    }
    if (doc.contains("source") && !doc.at("source").is_null()) {
      p.source = doc.at("source").get<std::string>();
    }
    for (const auto& entry : doc.value("tests", json::array())) {
      TestCase t;
      t.input = entry.at("input").get<std::string>();
      t.expected_output = entry.at("expected_output").get<std::string>();
      t.label = entry.value("label", std::string{});
      p.tests.push_back(std::move(t));
    }
  } catch (const json::exception& ex) {
    throw fail(ex.what());
  }

  // Hard invariants; a missing test suite is reported by validate_problem but
  // stays loadable (the problem may never reach functional validation).
  for (const auto& issue : validate_problem(p)) {
    if (issue.field != "tests") {
      throw fail(issue.field + ": " + issue.rule);
    }
  }
  return p;
}

Corpus load_corpus(const fs::path& dir) {
  if (!fs::exists(dir) || !fs::is_directory(dir)) {
    throw MissingPathError("corpus directory not found: " + dir.string());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& file : files) {
    json doc;
    try {
      doc = json::parse(read_file(file));
    } catch (const json::exception& ex) {
      throw MalformedProblemError(file.string(), ex.what());
    }
    Problem p = problem_from_json(doc, file.string());
    if (!seen.insert(p.id).second) {
      throw DuplicateIdError(p.id);
    }
    if (file.filename() != p.id + ".json") {
      throw MalformedProblemError(file.string(), "file name must be <id>.json");
    }
    corpus.push_back(std::move(p));
  }
  std::sort(corpus.begin(), corpus.end(),
            [](const Problem& a, const Problem& b) { return a.id < b.id; });
  return corpus;
}

}  // namespace vforge

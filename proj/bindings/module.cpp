#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vforge/corpus.hpp"
#include "vforge/functional.hpp"
#include "vforge/generation.hpp"
#include "vforge/healing.hpp"
#include "vforge/metrics.hpp"
#include "vforge/prompts.hpp"
#include "vforge/verification.hpp"

namespace py = pybind11;
using namespace vforge;

namespace {

VerifierReport report_from_text(const std::string& stdout_text,
                                const std::string& stderr_text, int exit_code,
                                bool timed_out) {
  VerifierReport report;
  report.exit_code = exit_code;
  report.stdout_text = stdout_text;
  report.stderr_text = stderr_text;
  report.timed_out = timed_out;
  report.diagnostics = parse_diagnostics(stdout_text, stderr_text, exit_code);
  bool any_error = false;
  for (const auto& diag : report.diagnostics) {
    if (diag.severity == Severity::Error) any_error = true;
  }
  report.verified = !timed_out && exit_code == 0 && !any_error &&
                    success_summary_present(stdout_text);
  return report;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dafny synthesis harness core";

  py::class_<TestCase>(m, "TestCase")
      .def(py::init<>())
      .def_readwrite("input", &TestCase::input)
      .def_readwrite("expected_output", &TestCase::expected_output)
      .def_readwrite("label", &TestCase::label);

  py::class_<Problem>(m, "Problem")
      .def(py::init<>())
      .def_readwrite("id", &Problem::id)
      .def_readwrite("title", &Problem::title)
      .def_readwrite("description", &Problem::description)
      .def_readwrite("signature", &Problem::signature)
      .def_readwrite("tags", &Problem::tags)
      .def_readwrite("source", &Problem::source)
      .def_readwrite("tests", &Problem::tests)
      .def("__repr__",
           [](const Problem& p) { return "<Problem id='" + p.id + "'>"; });

  py::class_<ValidationIssue>(m, "ValidationIssue")
      .def_readonly("field", &ValidationIssue::field)
      .def_readonly("rule", &ValidationIssue::rule);

  py::class_<PromptText>(m, "PromptText")
      .def_readonly("system", &PromptText::system)
      .def_readonly("user", &PromptText::user);

  py::class_<Diagnostic>(m, "Diagnostic")
      .def_readonly("file", &Diagnostic::file)
      .def_readonly("line", &Diagnostic::line)
      .def_readonly("column", &Diagnostic::column)
      .def_readonly("message", &Diagnostic::message)
      .def_property_readonly("severity",
                             [](const Diagnostic& d) {
                               return d.severity == Severity::Warning ? "warning"
                                                                      : "error";
                             })
      .def_property_readonly("phase", [](const Diagnostic& d) {
        switch (d.phase) {
          case PhaseHint::Parse: return "parse";
          case PhaseHint::Resolve: return "resolve";
          case PhaseHint::Verify: return "verify";
          default: return "unknown";
        }
      });

  m.def("load_corpus", &load_corpus, py::arg("path"),
        "Load a directory of <id>.json problem files, sorted by id.");
  m.def("validate_problem", &validate_problem, py::arg("problem"));

  m.def("render_contextless", &render_contextless, py::arg("problem"));
  m.def("render_signature", &render_signature, py::arg("problem"));
  m.def("render_repair", &render_repair, py::arg("previous_code"),
        py::arg("verifier_output"));

  m.def("extract_code", &extract_code, py::arg("raw_text"),
        "Dafny source pulled out of a raw model response, or None.");

  m.def("parse_diagnostics", &parse_diagnostics, py::arg("stdout_text"),
        py::arg("stderr_text") = "", py::arg("exit_code") = 0);
  m.def(
      "classify_output",
      [](const std::string& stdout_text, const std::string& stderr_text,
         int exit_code, bool extraction_ok, bool timed_out) {
        return std::string(category_name(classify(
            report_from_text(stdout_text, stderr_text, exit_code, timed_out),
            extraction_ok)));
      },
      py::arg("stdout_text"), py::arg("stderr_text") = "", py::arg("exit_code") = 0,
      py::arg("extraction_ok") = true, py::arg("timed_out") = false,
      "Outcome category for a captured verifier output.");

  m.def("normalize_output", &normalize_output, py::arg("text"));
  m.def("oracle_magic_formula", &oracle_magic_formula, py::arg("a"), py::arg("b"),
        py::arg("c"), py::arg("d"), py::arg("l"));
  m.def("has_weak_specification", &has_weak_specification, py::arg("src"));

  m.def("verify_at_k_unbiased", &verify_at_k_unbiased, py::arg("n"), py::arg("c"),
        py::arg("k"));
  m.def(
      "verify_at_k_empirical",
      [](const std::vector<std::vector<bool>>& outcomes, int k) {
        std::vector<CellOutcome> cells;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
          CellOutcome cell;
          cell.problem_id = "p" + std::to_string(i);
          cell.attempts = outcomes[i];
          cells.push_back(std::move(cell));
        }
        const VerifyRate rate = verify_at_k_empirical(cells, k);
        return py::make_tuple(rate.success, rate.total);
      },
      py::arg("outcomes"), py::arg("k"),
      "(success, total) over a list of per-problem attempt-result lists.");

  m.def(
      "render_summary_markdown",
      [](const std::filesystem::path& manifest) {
        return render_reports(load_manifest(manifest)).summary_md;
      },
      py::arg("manifest"));
  m.def(
      "render_errors_markdown",
      [](const std::filesystem::path& manifest) {
        return render_reports(load_manifest(manifest)).errors_md;
      },
      py::arg("manifest"));

  py::register_exception<Error>(m, "VforgeError");
}

"""Python surface of the Dafny synthesis harness core."""

from vforge._core import (
    Diagnostic,
    Problem,
    PromptText,
    TestCase,
    ValidationIssue,
    VforgeError,
    classify_output,
    extract_code,
    has_weak_specification,
    load_corpus,
    normalize_output,
    oracle_magic_formula,
    parse_diagnostics,
    render_contextless,
    render_errors_markdown,
    render_repair,
    render_signature,
    render_summary_markdown,
    validate_problem,
    verify_at_k_empirical,
    verify_at_k_unbiased,
)

__all__ = [
    "Diagnostic",
    "Problem",
    "PromptText",
    "TestCase",
    "ValidationIssue",
    "VforgeError",
    "classify_output",
    "extract_code",
    "has_weak_specification",
    "load_corpus",
    "normalize_output",
    "oracle_magic_formula",
    "parse_diagnostics",
    "render_contextless",
    "render_errors_markdown",
    "render_repair",
    "render_signature",
    "render_summary_markdown",
    "validate_problem",
    "verify_at_k_empirical",
    "verify_at_k_unbiased",
]

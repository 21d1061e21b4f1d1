"""Smoke tests for the Python bindings."""

import itertools
import math
import os
import pathlib

import pytest

import vforge

FIXTURES = pathlib.Path(os.environ.get("VFORGE_FIXTURES", "tests/fixtures"))


def test_load_corpus_and_validate():
    corpus = vforge.load_corpus(FIXTURES / "corpus")
    assert [p.id for p in corpus] == ["uva-10055", "uva-11172", "uva-11934"]
    relational = corpus[1]
    assert relational.signature is not None
    assert [t.input for t in relational.tests] == ["10 20", "20 10", "10 10"]
    assert [t.expected_output for t in relational.tests] == ["<", ">", "="]
    assert vforge.validate_problem(relational) == []


def test_prompt_rendering_matches_goldens():
    corpus = {p.id: p for p in vforge.load_corpus(FIXTURES / "corpus")}
    golden = (FIXTURES / "golden" / "prompts" / "uva-11172_contextless_user.txt").read_bytes()
    prompt = vforge.render_contextless(corpus["uva-11172"])
    assert prompt.user.encode() == golden
    assert prompt.system == "You are an expert in Dafny. Output ONLY raw Dafny code."

    signed = vforge.render_signature(corpus["uva-11172"])
    assert signed.user.startswith(prompt.user)
    assert "Method Signature Prompt:" in signed.user

    repair = vforge.render_repair("method M() {", "input.dfy(1,1): Error: rbrace expected")
    assert "failed verification with the following errors" in repair.user


def test_prompt_errors_raise():
    problem = vforge.Problem()
    problem.id = "uva-0"
    with pytest.raises(vforge.VforgeError):
        vforge.render_contextless(problem)


def test_extract_code():
    assert vforge.extract_code("```dafny\nmethod M() {}\n```") == "method M() {}"
    assert vforge.extract_code("no code here at all") is None


def test_classify_output():
    syntax = "input.dfy(6,0): Error: rbrace expected\n1 parse errors detected in input.dfy\n"
    assert vforge.classify_output(syntax, exit_code=2) == "syntax_error"
    proof = "input.dfy(5,0): Error: a postcondition could not be proved on this return path\n"
    assert vforge.classify_output(proof, exit_code=4) == "verification_error"
    ok = "Dafny program verifier finished with 2 verified, 0 errors\n"
    assert vforge.classify_output(ok, exit_code=0) == "verified"
    assert vforge.classify_output("", extraction_ok=False) == "extraction_failure"

    diagnostics = vforge.parse_diagnostics(syntax, "", 2)
    assert len(diagnostics) == 1
    assert diagnostics[0].line == 6
    assert diagnostics[0].phase == "parse"


def test_metrics():
    assert vforge.verify_at_k_unbiased(5, 2, 3) == pytest.approx(0.9, abs=1e-12)
    for n in range(1, 7):
        for c in range(n + 1):
            for k in range(1, n + 1):
                closed = vforge.verify_at_k_unbiased(n, c, k)
                total = hits = 0
                for subset in itertools.combinations(range(n), k):
                    total += 1
                    hits += any(i < c for i in subset)
                assert closed == pytest.approx(hits / total, abs=1e-12)

    success, total = vforge.verify_at_k_empirical(
        [[False, True], [False, False], [True, True]], 2
    )
    assert (success, total) == (2, 3)


def test_oracle_and_judge_helpers():
    assert vforge.oracle_magic_formula(0, 0, 0, 1, 5) == 6
    assert vforge.oracle_magic_formula(0, 0, 1, 2, 9) == 0
    assert vforge.oracle_magic_formula(1, 0, 0, 2, 4) == 3
    assert vforge.normalize_output("a \r\nb\n\n") == "a\nb"
    assert vforge.has_weak_specification("method M() { }")
    assert not vforge.has_weak_specification("method M()\n  ensures 1 == 1\n{ }")

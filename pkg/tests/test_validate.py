"""Invariant-suite tests: everything passes, reports are stable."""

from ep3ion.validate import run_all, report_text


def test_all_checks_pass():
    results = run_all(seed=123)
    failures = [(name, detail) for name, ok, detail in results if not ok]
    assert not failures, failures
    assert len(results) >= 20


def test_results_deterministic_per_seed():
    a = run_all(seed=7)
    b = run_all(seed=7)
    assert a == b
    names_a = [name for name, _, _ in a]
    names_c = [name for name, _, _ in run_all(seed=8)]
    assert names_a == names_c  # check list is fixed; only streams move


def test_report_text_format():
    results = run_all(seed=123)
    text = report_text(results, seed=123)
    lines = text.splitlines()
    assert lines[0] == "invariant validation (seed = 123)"
    assert lines[-1] == f"{len(results)}/{len(results)} checks passed"
    for line in lines[1:-1]:
        assert line.startswith(("PASS ", "FAIL "))
    assert text.endswith("\n")


def test_report_text_marks_failures():
    fake = [("alpha", True, "ok"), ("beta", False, "broke")]
    text = report_text(fake, seed=1)
    assert "FAIL beta " in text
    assert "1/2 checks passed" in text

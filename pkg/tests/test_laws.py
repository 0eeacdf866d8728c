import numpy as np
import pytest

from schemacalc.laws import SUITES, check_law, run_laws


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_passes_small(suite):
    reports = run_laws(20, 7, suites=[suite])
    assert reports and all(r.suite == suite for r in reports)
    bad = [(r.law, r.example) for r in reports if not r.ok]
    assert not bad


def test_reports_are_reproducible():
    a = [r.to_json() for r in run_laws(5, 11, suites=["workflow"])]
    b = [r.to_json() for r in run_laws(5, 11, suites=["workflow"])]
    assert a == b


def test_check_law_counts_crashes_as_failures():
    def crash(rng):
        raise RuntimeError("boom")

    r = check_law("x", "crash", crash, 3, np.random.default_rng(0))
    assert (r.passed, r.failed) == (0, 3) and "boom" in r.example


def test_false_law_is_reported():
    r = check_law("x", "coin", lambda rng: rng.random() < 0.5, 200, np.random.default_rng(0))
    assert r.failed > 0 and r.passed > 0 and not r.ok


def test_zero_cases_rejected():
    with pytest.raises(ValueError):
        run_laws(0, 0)

"""
检验组运行器测试
"""
import pytest

from torelli_lab.core.exceptions import GateViolationError
from torelli_lab.models.verification import CheckStatus, SuiteReport
from torelli_lab.services.verification import SUITES, run_suite


@pytest.mark.parametrize("name", ["exactalg", "symplectic", "homology", "invariants", "cocycle"])
def test_cheap_suites_pass(name, seed):
    report = run_suite(name, 2, 5, 20, seed)
    assert report.suite == name
    assert report.checks
    assert report.passed, report.lines()


def test_trees_suite_passes(seed):
    report = run_suite("trees", 3, 5, 1, seed)
    assert report.passed, report.lines()


def test_mutations_are_detected(seed):
    report = run_suite("mutations", 3, 5, 10, seed)
    assert [c.name for c in report.checks] == [
        "drop_half_term_detected",
        "flip_omega_detected",
        "drop_ihx_detected",
    ]
    assert report.passed, report.lines()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["forms", "coinv"])
def test_genus_four_suites(name, seed):
    report = run_suite(name, 4, 5, 2, seed)
    assert report.passed, report.lines()


def test_unknown_suite():
    with pytest.raises(GateViolationError):
        run_suite("nope", 4, 5, 1, 0)


@pytest.mark.parametrize("name,genus", [("forms", 3), ("coinv", 3), ("trees", 2), ("mutations", 2)])
def test_genus_floor(name, genus):
    with pytest.raises(GateViolationError):
        run_suite(name, genus, 5, 1, 0)


def test_same_seed_same_report(seed):
    first = run_suite("invariants", 2, 5, 10, seed)
    second = run_suite("invariants", 2, 5, 10, seed)
    assert first.lines() == second.lines()


def test_report_lines():
    report = SuiteReport(suite="demo")
    report.record("ok", True, samples=3)
    report.record("bad", False, samples=3, detail="x=1")
    assert report.lines() == ["demo.ok = PASS", "demo.bad = FAIL  # x=1"]
    assert not report.passed
    assert report.checks[0].status == CheckStatus.PASS
    assert report.checks[0].detail is None


def test_suite_names_are_stable():
    assert SUITES[0] == "exactalg"
    assert "mutations" in SUITES

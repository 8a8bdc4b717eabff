import pytest

from twosym import verify
from twosym.metric import PpWaveMetric


def test_all_random_suites_pass():
    for rep in verify.run_suites(["bianchi", "oracle", "transform"], budget=8, seed=5):
        assert rep.passed, rep.to_json()
        assert rep.cases == 8


def test_single_metric_mode():
    m = PpWaveMetric.from_string(2, "u*x1^3 - x2^2*u^2")
    reps = verify.run_suites(["bianchi", "oracle"], metric=m)
    assert all(r.cases == 1 and r.passed for r in reps)


def test_annihilator_suite_reports_details():
    rep = verify.run_lemma2((2,))
    assert rep.passed
    assert rep.details == [{"n": 2, "annihilator_dimension": 1, "proportional_to_qprime_R_Id": True,
                            "type_I_annihilator_dimension": 0}]


def test_failure_records_first_counterexample():
    rep = verify.SuiteReport("demo", {"a": "pass"})
    rep.fail("a", {"x": 1})
    rep.fail("a", {"x": 2})
    doc = rep.to_json()
    assert doc["status"] == "fail" and doc["counterexample"] == {"check": "a", "x": 1}


def test_budget_from_env(monkeypatch):
    monkeypatch.delenv(verify.BUDGET_ENV, raising=False)
    assert verify.budget_from_env() == verify.DEFAULT_BUDGET
    monkeypatch.setenv(verify.BUDGET_ENV, "3")
    assert verify.budget_from_env() == 3
    monkeypatch.setenv(verify.BUDGET_ENV, "lots")
    with pytest.raises(ValueError):
        verify.budget_from_env()


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run_suites(["nope"])

import pytest

from qhomology.constants import SUITES
from qhomology.errors import InvalidHeightError, QHomologyError
from qhomology.suites import HochschildRefused, run_suites, select_suites, verify_section3


def test_select_suites_orders_by_dependency():
    assert select_suites(None) == SUITES
    assert select_suites(["all", "relations"]) == SUITES
    assert select_suites(["hochschild", "relations", "theorem1"]) == ["relations", "theorem1", "hochschild"]
    with pytest.raises(QHomologyError):
        select_suites(["relations", "nope"])


def test_run_suites_guards():
    with pytest.raises(InvalidHeightError):
        run_suites(1, ["relations"], cache_dir=None)
    with pytest.raises(HochschildRefused) as e:
        run_suites(4, ["hochschild"], cache_dir=None)
    assert "dim H = 256" in str(e.value)


def test_section3(model2, model3):
    for model in (model2, model3):
        report = verify_section3(model, seed=1, oracle_trials=40)
        assert report.passed, [c.id for c in report.failures]
    assert report.data["dims_on_H"] != [1, 1]


def test_theorems_agree_through_run_suites(tmp_path):
    reports = run_suites(2, ["theorem1", "hochschild"], seed=0, trials=12, cache_dir=str(tmp_path), cap=256)
    assert [r.suite for r in reports] == ["theorem1", "hochschild"]
    assert all(r.passed for r in reports)
    assert any(c.id == "theorem2.matches_theorem1" and c.passed for c in reports[1].checks)
    assert all(r.elapsed is not None for r in reports)


@pytest.mark.slow
def test_section3_larger_heights(large_model):
    h = large_model.h
    report = verify_section3(large_model, seed=3, oracle_trials=200)
    assert report.passed, [c.id for c in report.failures]
    oracle = next(c for c in report.checks if c.id == "section3.oracle")
    assert oracle.passed and "200" in oracle.detail
    assert report.data["dims_on_H"] != [1] * (h - 1)

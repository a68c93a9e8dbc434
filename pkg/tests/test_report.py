import json

import pytest

from qhomology.errors import SchemaError
from qhomology.linalg import ExactMatrix
from qhomology.report import (Check, Report, SuiteReport, dims_table, dump_json, identity_check,
                              render_report, render_template, validate_with_schema)


def test_check_of_drops_witness_on_pass():
    assert Check.of("x", True, {"row": 1}).to_json() == {"id": "x", "status": "pass"}
    failed = Check.of("x", False, {"row": 1}, "detail")
    assert not failed.passed
    assert failed.to_json() == {"id": "x", "status": "fail", "witness": {"row": 1}, "detail": "detail"}


def test_identity_check(ctx2):
    assert identity_check("zero", ExactMatrix.zeros(ctx2, 3)).passed
    defect = ExactMatrix.from_dense(ctx2, [[0, 0, 0], [0, 0, 1], [0, 1, 0]])
    check = identity_check("moved", defect, lambda j: f"e{j}")
    assert check.status == "fail"
    assert check.witness == {"row": 2, "column": 1, "basis": "e1"}


def sample_report():
    suite = SuiteReport("theorem0", 2, seed=3)
    suite.add(Check.of("dims.H", True))
    suite.add(Check.of("dims.H_I", False, {"dim": 4}))
    suite.data = {"dims": [1], "note": "text"}
    suite.elapsed = 0.25
    return Report({"heights": [2], "suites": ["theorem0"], "seed": 3, "trials": 5}, [suite])


def test_report_json_validates():
    report = sample_report()
    assert not report.passed
    assert [c.id for c in report.suites[0].failures] == ["dims.H_I"]
    data = json.loads(render_report(report, "json"))
    assert data["schema"] == "qhomology/1"
    assert data["status"] == "fail"
    assert data["suites"][0]["seed"] == 3
    assert "elapsed" not in data["suites"][0]


def test_schema_error():
    data = sample_report().to_json()
    data["status"] = "maybe"
    with pytest.raises(SchemaError):
        dump_json(data, "report")
    with pytest.raises(SchemaError):
        validate_with_schema({"h": 2, "rows": 1}, "matrix")


def test_text_report():
    text = render_report(sample_report(), "text")
    assert "theorem0 (h=2): FAIL in 0.25s" in text
    assert "dims.H_I" in text
    assert "SOME CHECKS FAILED" in text


def test_dims_table_skips_non_integer_lists():
    table = dims_table({"dims": [1, 1], "words": ["E"], "h": 3})
    assert "dims" in table and "words" not in table
    assert dims_table({}) == ""


def test_local_template_overrides_bundled(tmp_path):
    (tmp_path / "templates").mkdir()
    (tmp_path / "templates" / "report.tpl").write_text("{{ suites | length }} suites")
    assert render_template("report", {"suites": [1, 2]}, str(tmp_path)) == "2 suites"

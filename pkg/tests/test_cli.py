import argparse
import json
import sys

import pytest

from qhomology.constants import DEFAULT_TRIALS
from qhomology.errors import NotNilpotentError, QHomologyError
from qhomology.linalg import nilpotent_profile
from qhomology.qhomology import UsageError, load_preset, main, parse_heights, resolve_config
from qhomology.toolkit import feasibility as feasibility_tool
from qhomology.toolkit import homology as homology_tool
from qhomology.toolkit.build import build_models
from qhomology.toolkit.feasibility import cmd_feasibility
from qhomology.toolkit.homology import cmd_homology, compute_homology
from qhomology.toolkit.jordan import jordan_matrix


def run(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    return e.value.code


def flags(**overrides):
    values = dict(height=None, suite=None, seed=None, trials=None, format=None, force=False)
    values.update(overrides)
    return argparse.Namespace(**values)


def test_height_below_two_is_a_usage_error():
    assert run(["verify", "--height", "1"]) == 2
    with pytest.raises(UsageError):
        parse_heights("2,x")


def test_hochschild_refused_above_limit():
    assert run(["verify", "--height", "4", "--suite", "hochschild"]) == 2


def test_presets(tmp_path, capsys):
    presets = tmp_path / "presets"
    presets.mkdir()
    (presets / "tiny.yml").write_text("description: tiny run\nheights: [2]\nsuites: [relations]\n")
    assert run(["presets", "--qhomology-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "tiny" in out and "tiny run" in out
    assert load_preset("tiny", str(tmp_path))["heights"] == [2]
    with pytest.raises(UsageError):
        load_preset("missing", str(tmp_path))
    assert run(["presets", "--qhomology-dir", str(tmp_path / "nowhere")]) == 2


def test_flags_beat_preset_beats_defaults():
    preset = {"heights": [3], "suites": ["theorem0", "relations"], "seed": 5}
    config = resolve_config(flags(), preset)
    assert config["heights"] == [3]
    assert config["suites"] == ["relations", "theorem0"]
    assert config["seed"] == 5
    assert config["trials"] == DEFAULT_TRIALS
    config = resolve_config(flags(seed=7, height=[2]), preset)
    assert (config["seed"], config["heights"]) == (7, [2])


def test_bad_config():
    with pytest.raises(UsageError):
        resolve_config(flags(trials=0), {})
    with pytest.raises(UsageError):
        resolve_config(flags(), {"format": "xml"})
    with pytest.raises(QHomologyError):
        resolve_config(flags(), {"suites": ["theorem9"]})


def test_json_report_is_deterministic(tmp_path):
    outputs = []
    for n in range(2):
        out = tmp_path / f"report{n}.json"
        code = run(["verify", "--height", "2", "--suite", "relations", "--suite", "theorem0",
                    "--format", "json", "--seed", "3", "--cache-dir", str(tmp_path / "cache"), "--out", str(out)])
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    data = json.loads(outputs[0])
    assert data["status"] == "pass"
    assert [s["suite"] for s in data["suites"]] == ["relations", "theorem0"]
    assert data["config"]["heights"] == [2]


def test_text_report_for_section3(tmp_path):
    out = tmp_path / "report.txt"
    code = run(["verify", "--height", "2", "--suite", "section3", "--trials", "5",
                "--cache-dir", str(tmp_path / "cache"), "--out", str(out)])
    assert code == 0
    assert "ALL CHECKS PASSED" in out.read_text()


def test_compute_homology():
    result = compute_homology(jordan_matrix([0, 1, 2], seed=11), 3)
    assert result["dims"] == result["predicted"] == [1, 1]
    assert result["multiplicities"] == [0, 1, 2]
    assert compute_homology(jordan_matrix([5, 0]), 2, 1)["dims"] == [5]
    assert result["h"] == 3 and "per_degree" not in result
    with pytest.raises(QHomologyError):
        compute_homology(jordan_matrix([0, 1, 2], seed=11), 3, 3)


def test_compute_homology_rejects_non_nilpotent():
    with pytest.raises(NotNilpotentError) as e:
        compute_homology(jordan_matrix([0, 0, 1]), 2)
    assert e.value.power == 2
    assert e.value.index == 3


def test_jordan_matrix_keeps_its_type():
    M = jordan_matrix([1, 0, 2], seed=4)
    assert nilpotent_profile(M, 3).multiplicities == (1, 0, 2)
    assert M.ctx.h == 3


def test_homology_tool(tmp_path, monkeypatch, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(jordan_matrix([0, 1, 2], seed=2).to_json()))
    monkeypatch.setattr(sys, "argv", ["qhomology-homology", str(path), "--format", "json"])
    with pytest.raises(SystemExit) as e:
        homology_tool.main()
    assert e.value.code == 0
    assert json.loads(capsys.readouterr().out)["dims"] == [1, 1]

    monkeypatch.setattr(sys, "argv", ["qhomology-homology", str(path), "--height", "2"])
    with pytest.raises(SystemExit) as e:
        homology_tool.main()
    assert e.value.code == 1


def test_cmd_homology(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(jordan_matrix([0, 0, 1], seed=5).to_json()))
    assert cmd_homology(str(path))["dims"] == [0, 0]
    assert cmd_homology(str(path), k=2)["dims"] == [0]
    with pytest.raises(QHomologyError):
        cmd_homology(str(path), k=3)


def test_cmd_feasibility():
    assert cmd_feasibility(5, 3).witnesses == [[0, 1, 1]]
    assert not cmd_feasibility(81, 3).feasible


def test_feasibility_tool(monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["qhomology-feasibility", "5", "3", "--format", "json"])
    feasibility_tool.main()
    data = json.loads(capsys.readouterr().out)
    assert data["feasible"] is True
    assert data["witnesses"] == [[0, 1, 1]]


def test_build_models(tmp_path):
    summary = build_models([2], str(tmp_path))
    assert summary == [{"h": 2, "dim_F": 4, "dim_H": 16, "dim_H_I": 3,
                        "path": str(tmp_path / "model-h2-v1.json")}]

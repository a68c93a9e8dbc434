import json

import pytest

from qhomology.cache import cache_path, load_or_build, model_from_json, model_to_json
from qhomology.errors import ExpectationError, SchemaError


def test_round_trip(model2):
    restored = model_from_json(json.loads(json.dumps(model_to_json(model2))))
    assert restored.a == model2.a
    assert restored.H_I == model2.H_I
    assert restored.A == model2.A
    assert restored.inv_basis == model2.inv_basis


def test_load_or_build_writes_and_reads(tmp_path, model2):
    built = load_or_build(2, str(tmp_path))
    path = cache_path(str(tmp_path), 2)
    assert path.exists()
    assert json.loads(path.read_text())["h"] == 2
    loaded = load_or_build(2, str(tmp_path))
    assert loaded.a == built.a == model2.a
    assert loaded.H_I == model2.H_I


def test_format_mismatch(model2):
    data = model_to_json(model2)
    data["format"] = data["format"] + 1
    with pytest.raises(ExpectationError):
        model_from_json(data)


def test_unreadable_cache_is_rebuilt(tmp_path, model2):
    path = cache_path(str(tmp_path), 2)
    path.write_text("{ not json")
    model = load_or_build(2, str(tmp_path))
    assert model.H_I == model2.H_I
    assert json.loads(path.read_text())["format"] == model_to_json(model2)["format"]


def test_no_cache_dir_builds_in_memory(tmp_path):
    model = load_or_build(2, None)
    assert model.dim_H == 16
    assert not list(tmp_path.iterdir())


@pytest.mark.parametrize("text", ["[]", "{}", '{"format": 1, "h": 2, "a": [], "H_I": {}}', '"model"'])
def test_wrong_shape_cache_is_rebuilt(tmp_path, model2, text):
    path = cache_path(str(tmp_path), 2)
    path.write_text(text)
    model = load_or_build(2, str(tmp_path))
    assert model.H_I == model2.H_I
    assert json.loads(path.read_text())["h"] == 2


def test_schema_rejects_wrong_shape(model2):
    with pytest.raises(SchemaError):
        model_from_json([])
    data = model_to_json(model2)
    del data["a"]["21"]
    with pytest.raises(SchemaError):
        model_from_json(data)

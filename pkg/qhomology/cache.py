"""On-disk cache of zero-mode models, one JSON file per (h, format version)."""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

from .constants import CACHE_DIR, CACHE_FORMAT_VERSION, VERSION
from .cyclo import Scalar, field_new
from .errors import ExpectationError
from .linalg import ExactMatrix, Subspace
from .report import validate_with_schema
from .wznw import (ZeroModeModel, build_bilinears, build_model, build_quea, fock_basis,
                   invariant_basis)

logger = logging.getLogger(__name__)


def cache_path(cache_dir: str, h: int) -> Path:
    return Path(cache_dir) / f"model-h{h}-v{CACHE_FORMAT_VERSION}.json"


def model_to_json(model: ZeroModeModel) -> dict:
    return {
        "format": CACHE_FORMAT_VERSION,
        "version": VERSION,
        "h": model.h,
        "a": {f"{i}{alpha}": m.to_json() for (i, alpha), m in sorted(model.a.items())},
        "H_I": {
            "pivots": model.H_I.pivots,
            "basis": [[[j, v.to_json()] for j, v in sorted(vec.items())] for vec in model.H_I.basis],
        },
    }


def model_from_json(data: dict) -> ZeroModeModel:
    """Rebuild a model from its lowering operators and invariant subspace; the cheap stages are recomputed."""
    validate_with_schema(data, "cache")
    if data.get("format") != CACHE_FORMAT_VERSION:
        raise ExpectationError(f"cache format {data.get('format')} does not match {CACHE_FORMAT_VERSION}")
    h = int(data["h"])
    ctx = field_new(h)
    a = {(int(k[0]), int(k[1])): ExactMatrix.from_json(m, ctx) for k, m in data["a"].items()}
    abar = {(alpha, i): a[(i, alpha)] for i in (1, 2) for alpha in (1, 2)}
    model = ZeroModeModel(h, ctx, fock_basis(h), a, abar)
    model.quea = build_quea(model)
    model.bilinears = build_bilinears(model)
    basis = [{int(j): Scalar.from_json(ctx, v) for j, v in vec} for vec in data["H_I"]["basis"]]
    model.H_I = Subspace(ctx, model.dim_H, basis, [int(p) for p in data["H_I"]["pivots"]])
    if model.H_I.dim != 2 * h - 1:
        raise ExpectationError(f"cached invariant subspace has dimension {model.H_I.dim}")
    model.inv_basis = invariant_basis(model)
    return model


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_or_build(h: int, cache_dir: Optional[str] = CACHE_DIR, use_cache: bool = True) -> ZeroModeModel:
    """Load the model for height h from the cache, building and storing it on a miss."""
    if not cache_dir or not use_cache:
        model = build_model(h)
        if cache_dir:
            write_atomic(cache_path(cache_dir, h), json.dumps(model_to_json(model), sort_keys=True))
        return model
    path = cache_path(cache_dir, h)
    if path.exists():
        try:
            with open(path, 'r') as f:
                model = model_from_json(json.load(f))
            logger.info("h=%d: model loaded from %s", h, path)
            return model
        except (ValueError, KeyError) as e:
            # SchemaError and JSONDecodeError are ValueErrors
            logger.warning("Ignoring unreadable cache file %s: %s", path, e)
    logger.info("h=%d: cache miss, building model", h)
    model = build_model(h)
    write_atomic(path, json.dumps(model_to_json(model), sort_keys=True))
    return model

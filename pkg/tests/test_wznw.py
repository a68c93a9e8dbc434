from dataclasses import replace

import pytest

from qhomology.cyclo import q_int
from qhomology.errors import InvalidHeightError
from qhomology.linalg import nilpotent_profile
from qhomology.wznw import (FockIndex, fock_basis, profile_on_H, restricted_A,
                            verify_matrix_relations, verify_theorem0)


@pytest.fixture(params=[2, 3])
def model(request, model2, model3):
    return {2: model2, 3: model3}[request.param]


def test_dimensions(model2, model3):
    assert (model2.dim_F, model2.dim_H, model2.H_I.dim) == (4, 16, 3)
    assert (model3.dim_F, model3.dim_H, model3.H_I.dim) == (9, 81, 5)


def test_fock_basis_order():
    assert fock_basis(2) == [FockIndex(1, 0), FockIndex(2, 0), FockIndex(2, 1), FockIndex(3, 1)]
    assert all(b.n <= 2 and b.m <= 2 for b in fock_basis(3))


@pytest.mark.parametrize("h", [1, 0, -3, True, 2.0])
def test_invalid_height(h):
    with pytest.raises(InvalidHeightError):
        fock_basis(h)


def test_lowering_operators(model):
    ctx = model.ctx
    index = {(b.m, b.n): j for j, b in enumerate(model.basis)}
    a21, a22 = model.a[(2, 1)], model.a[(2, 2)]
    for j, b in enumerate(model.basis):
        m, n = b.m, b.n
        if n:
            assert a21.entry(index[(m, n - 1)], j) == -ctx.zeta * q_int(ctx, n)
        if m:
            assert a22.entry(index[(m - 1, n)], j) == ctx.zeta_power(-1) * ctx.q_power(-n) * q_int(ctx, m)
    assert a21.nnz == sum(1 for b in model.basis if b.n)
    assert a22.nnz == sum(1 for b in model.basis if b.m)


def test_relations_hold(model):
    report = verify_matrix_relations(model)
    assert report.passed, [c.id for c in report.failures]
    ids = {c.id for c in report.checks}
    assert {"chiral.exchange.12.21", "bar.determinant.12", "quea.chiral.EF", "invariance.E.12",
            "bilinear.[A,A']", "bilinear.A2A1"} <= ids


def test_theorem0(model):
    report = verify_theorem0(model)
    assert report.passed, [c.id for c in report.failures]
    h = model.h
    assert report.data["dims"] == [1] * (h - 1)
    expected = [0] * h
    expected[h - 2] += 1
    expected[h - 1] += 1
    assert report.data["multiplicities"] == expected


def test_restricted_A_has_one_full_block(model3):
    profile = nilpotent_profile(restricted_A(model3).d, 3)
    assert profile.multiplicities == (0, 1, 1)


def test_profile_on_H(model):
    profile = profile_on_H(model)
    assert profile["predicted"] == profile["dims"]
    assert profile["dims"] != [1] * (model.h - 1)
    assert profile["ranks"][0] == model.dim_H


def test_corrupted_entry_is_caught(model2):
    a = dict(model2.a)
    a[(2, 1)] = a[(2, 1)].scale(2)
    report = verify_matrix_relations(replace(model2, a=a))
    assert not report.passed
    failed = {c.id: c for c in report.failures}
    assert "chiral.determinant.12" in failed
    witness = failed["chiral.determinant.12"].witness
    assert {"row", "column", "basis"} <= set(witness)


@pytest.mark.slow
def test_larger_heights(large_model):
    model, h = large_model, large_model.h
    assert model.H_I.dim == 2 * h - 1
    assert verify_matrix_relations(model).passed
    report = verify_theorem0(model)
    assert report.passed
    assert report.data["dims"] == [1] * (h - 1)

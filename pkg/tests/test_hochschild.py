import random

import pytest

from qhomology.hochschild import (SAMPLES, Cochain, DegreeZeroMap, algebra_checks, apply_Q,
                                  build_image_algebra, build_zero_mode_complex, coface, combine,
                                  extend_A_cochain, filtered_homology_F0, first_nonzero_tuple, hochschild_d,
                                  iterate, padded, random_cochain, random_vector, tuple_plan,
                                  verify_hochschild, verify_theorem1)
from qhomology.linalg import ExactMatrix, vec_scale, vec_sub


@pytest.fixture(scope="session")
def alg2(model2):
    return build_image_algebra(model2)


def test_zero_mode_complex_dims(model2, model3):
    assert build_zero_mode_complex(model2).total.dim == 29
    zc = build_zero_mode_complex(model3)
    assert zc.total.dim == 233
    assert zc.canonical.space.grading == (81, 76, 76)


@pytest.mark.parametrize("which", ["model2", "model3"])
def test_theorem1(which, request):
    model = request.getfixturevalue(which)
    report = verify_theorem1(model, seed=1, cone_trials=8, ledger_trials=4)
    assert report.passed, [c.id for c in report.failures]
    assert report.data["dims"] == [1] * (model.h - 1)
    assert report.data["dims_H_I"] == report.data["dims"]


def test_image_algebra(model2, alg2):
    assert all(c.passed for c in algebra_checks(model2, alg2))
    assert alg2.words[0] == ()
    assert alg2.counit[0] == 1
    assert alg2.epsilon_of(alg2.generator_coords["E"]) == 0
    assert alg2.epsilon_of(alg2.generator_coords["Qd"]) == 1
    assert alg2.generator_indices
    assert alg2.mult(0, 3) == {3: alg2.ctx.one}


def test_degree_zero_differential(model2, alg2):
    ctx = model2.ctx
    psi = random_vector(ctx, model2.dim_H, random.Random(5))
    dpsi = hochschild_d(alg2, Cochain.from_vector(alg2, psi))
    E = DegreeZeroMap(alg2)
    for x in range(alg2.dim):
        expected = vec_sub(alg2.act(x, psi), vec_scale(psi, alg2.counit[x]))
        assert dpsi((x,)) == expected
        assert E.operator((x,)).apply(psi) == expected
    vacuum = Cochain.from_vector(alg2, {model2.h_vacuum_index: ctx.one})
    assert first_nonzero_tuple(hochschild_d(alg2, vacuum), [(x,) for x in range(alg2.dim)]) is None


def test_cofaces_on_degree_zero(model2, alg2):
    psi = random_vector(model2.ctx, model2.dim_H, random.Random(9))
    omega = Cochain.from_vector(alg2, psi)
    left, right = coface(alg2, 0, omega), coface(alg2, 1, omega)
    for x in range(alg2.dim):
        assert left((x,)) == alg2.act(x, psi)
        assert right((x,)) == vec_scale(psi, alg2.counit[x])
    for alpha in (-1, 2):
        with pytest.raises(ValueError):
            coface(alg2, alpha, omega)


def test_cochain_arity(alg2):
    omega = random_cochain(alg2, 2, "arity")
    with pytest.raises(ValueError):
        omega((0,))
    with pytest.raises(ValueError):
        Cochain(alg2, 1)
    with pytest.raises(ValueError):
        combine([(alg2.ctx.one, omega), (alg2.ctx.one, Cochain.zero(alg2, 1))])
    assert not (omega - omega)((1, 2))


def test_d_to_the_h_vanishes(model2, alg2):
    rng = random.Random(2)
    for degree in (0, 1):
        omega = random_cochain(alg2, degree, f"dh:{degree}")
        ddomega = iterate(lambda w: hochschild_d(alg2, w), omega, model2.h)
        assert first_nonzero_tuple(ddomega, tuple_plan(alg2, degree + 2, rng, cap=256)) is None


def test_A_on_degree_zero_is_plain_A(model2, alg2):
    psi = random_vector(model2.ctx, model2.dim_H, random.Random(4))
    assert extend_A_cochain(model2, Cochain.from_vector(alg2, psi))(()) == model2.A.apply(psi)


def test_apply_Q_splits_by_degree(model2, alg2):
    psi = random_vector(model2.ctx, model2.dim_H, random.Random(6))
    q_psi = apply_Q(model2, alg2, {0: Cochain.from_vector(alg2, psi)})
    assert sorted(q_psi) == [0, 1]
    assert q_psi[0](()) == model2.A.apply(psi)
    E = DegreeZeroMap(alg2)
    g = alg2.generator_indices[0]
    assert q_psi[1]((g,)) == E.operator((g,)).apply(psi)


def test_tuple_plan(alg2):
    rng = random.Random(0)
    assert len(tuple_plan(alg2, 1, rng, cap=alg2.dim)) == alg2.dim
    plan = tuple_plan(alg2, 3, rng, cap=1)
    assert plan[0] == padded(alg2, 3, alg2.unit_index)
    assert len(plan) == 1 + len(alg2.generator_indices) + SAMPLES
    assert all(len(t) == 3 for t in plan)


def test_degree_zero_map_identity(alg2):
    E = DegreeZeroMap(alg2)
    assert E.operator(()) == ExactMatrix.identity(alg2.ctx, alg2.dim_H)
    assert E.operator((alg2.unit_index,)).is_zero()


def test_filtered_homology_F0(model2, alg2):
    f0 = filtered_homology_F0(model2, alg2, 1, seed=0, cap=256)
    assert f0.dim == f0.characterized_dim == 1
    assert f0.agree and f0.verified
    assert len(f0.classes) == 1
    assert model2.H_I.contains(f0.classes[0].representative)
    with pytest.raises(ValueError):
        filtered_homology_F0(model2, alg2, 2)


def test_verify_hochschild_h2(model2):
    report = verify_hochschild(model2, trials=12, seed=0, cap=256)
    assert report.passed, [c.id for c in report.failures]
    assert report.data["theorem2"] == [1]
    assert report.data["prop4"] == [13]
    ids = {c.id for c in report.checks}
    assert {"lemma2.degree0", "prop4.rank_d", "cochain.(d+A)^h", "theorem2.ends"} <= ids


@pytest.mark.slow
def test_verify_hochschild_h3(model3):
    report = verify_hochschild(model3, trials=6, seed=0, cap=512)
    assert report.passed, [c.id for c in report.failures]
    assert report.data["theorem2"] == [1, 1]
    assert report.data["prop4"] == [76, 76]


@pytest.mark.slow
def test_theorem1_larger_heights(large_model):
    h = large_model.h
    report = verify_theorem1(large_model, seed=0, cone_trials=12, ledger_trials=4)
    assert report.passed, [c.id for c in report.failures]
    passed = {c.id for c in report.checks if c.passed}
    assert {"prop3.Ad-q2dA", "prop3.A^h", "prop3.Q^h", "prop1.per_degree", "lemma1.model", "lemma1.random"} <= passed
    assert report.data["dims"] == report.data["dims_H_I"] == [1] * (h - 1)
    assert report.data["total_dim"] == h ** 4 + (h - 1) * (h ** 4 - 2 * h + 1)

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhomology.cyclo import field_new
from qhomology.errors import (InvarianceViolationError, NotNilpotentError, QCommutationError,
                              QHomologyError)
from qhomology.linalg import (ExactMatrix, Subspace, jordan_nilpotent, kernel_basis,
                              random_multiplicities, random_nilpotent, shift_block)
from qhomology.ndiff import (HDiffSpace, canonical_hcomplex, check_q_commutation, cone,
                             exact_sequence_ledger, feasibility, gen_homology, homology_dims_from_multiplicities,
                             homology_report, induced_quotient_map, per_degree_homology, profile_homology,
                             restrict_to_subspace, verify_canonical_homology, witness_space)


def dims_of(space):
    return [gen_homology(space, k, representatives=False)[0] for k in range(1, space.h)]


def test_single_full_block_is_acyclic(ctx3):
    assert dims_of(HDiffSpace(3, 3, shift_block(ctx3, 3))) == [0, 0]


def test_zero_differential(ctx2):
    assert dims_of(HDiffSpace(2, 5, ExactMatrix.zeros(ctx2, 5))) == [5]


def test_mixed_blocks(ctx3):
    space = witness_space(ctx3, [0, 1, 2])
    assert dims_of(space) == [1, 1]
    dim, reps = gen_homology(space, 1)
    assert dim == reps.dim == 1
    assert profile_homology(space.d, 3) == ([0, 1, 2], [1, 1])


def test_homology_index_range(ctx3):
    space = witness_space(ctx3, [1, 0, 0])
    for k in (0, 3):
        with pytest.raises(QHomologyError):
            gen_homology(space, k)


def test_not_nilpotent(ctx2):
    space = HDiffSpace(2, 3, shift_block(ctx2, 3))
    with pytest.raises(NotNilpotentError) as e:
        gen_homology(space, 1)
    assert e.value.index == 3


def test_per_degree_needs_grading(ctx2):
    with pytest.raises(QHomologyError):
        per_degree_homology(witness_space(ctx2, [1, 1]), 1)


@pytest.mark.parametrize("dim,h,feasible,witnesses", [
    (16, 2, False, []),
    (3, 2, True, [[1, 1]]),
    (81, 3, False, []),
    (5, 3, True, [[0, 1, 1]]),
    (7, 3, True, [[1, 0, 2]]),
    (1, 2, True, [[1, 0]]),
])
def test_feasibility(dim, h, feasible, witnesses):
    result = feasibility(dim, h)
    assert result.feasible is feasible
    assert result.witnesses == witnesses


@pytest.mark.parametrize("h", [2, 3, 4, 5, 6])
def test_fourth_powers_are_infeasible(h):
    assert not feasibility(h ** 4, h).feasible
    assert feasibility(2 * h - 1, h).feasible


@pytest.mark.parametrize("dim,h", [(5, 3), (7, 3), (9, 4), (11, 4)])
def test_witnesses_have_one_dimensional_homology(dim, h):
    ctx = field_new(h)
    for m in feasibility(dim, h).witnesses:
        assert dims_of(witness_space(ctx, m)) == [1] * (h - 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(2, 5), st.integers(0, 10_000))
def test_multiplicity_formula_matches_ranks(dim, h, seed):
    m = random_multiplicities(dim, h, random.Random(seed))
    predicted = homology_dims_from_multiplicities(m, h)
    assert dims_of(witness_space(field_new(h), m)) == predicted
    assert predicted == predicted[::-1]


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(2, 4), st.integers(0, 10_000))
def test_cone_is_acyclic(dim, h, seed):
    ctx = field_new(h)
    L, _ = random_nilpotent(ctx, dim, h, random.Random(seed))
    space = cone(dim, L, h)
    assert space.grading is None
    assert space.filtration == (dim,) * h
    assert space.offsets()[-1] == dim * h
    assert dims_of(space) == [0] * (h - 1)


def test_cone_rejects_non_nilpotent(ctx2):
    with pytest.raises(NotNilpotentError):
        cone(3, shift_block(ctx2, 3), 2)


def test_cone_is_filtered_not_graded(ctx2):
    space = cone(2, shift_block(ctx2, 2), 2)
    with pytest.raises(QHomologyError):
        per_degree_homology(space, 1)
    assert homology_report(space).to_json() == {"h": 2, "dims": [0]}


def test_restrict_to_subspace(ctx3):
    N = shift_block(ctx3, 3)
    sub = restrict_to_subspace(HDiffSpace(3, 3, N), kernel_basis(N.power(2)))
    assert sub.dim == 2
    assert sub.d == shift_block(ctx3, 2)
    assert [gen_homology(sub, k, representatives=False)[0] for k in (1, 2)] == [1, 1]


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(2, 4), st.integers(0, 10_000))
def test_canonical_complex(V, h, seed):
    ctx = field_new(h)
    rng = random.Random(seed)
    W = Subspace.coordinate_span(ctx, V, rng.sample(range(V), rng.randint(0, V)))
    cc = canonical_hcomplex(V, W, h)
    assert cc.space.dim == V + (h - 1) * (V - W.dim)
    assert verify_canonical_homology(cc) == [[W.dim] + [0] * (h - 1)] * (h - 1)
    assert dims_of(cc.space) == [W.dim] * (h - 1)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(2, 4), st.integers(0, 10_000))
def test_exact_sequence_ledger(dim, h, seed):
    ctx = field_new(h)
    rng = random.Random(seed)
    N, _ = random_nilpotent(ctx, dim, h, rng)
    W = kernel_basis(N.power(rng.randint(1, h - 1)))
    if W.dim == dim:
        return
    ledger = exact_sequence_ledger(dim, W, N, h)
    assert ledger.balanced
    assert ledger.to_json()["balanced"] is True


def test_ledger_for_a_single_block(ctx3):
    N = shift_block(ctx3, 3)
    ledger = exact_sequence_ledger(3, kernel_basis(N), N, 3)
    assert ledger.sub_dims == ledger.total_dims == [1, 1]
    assert ledger.cone_dims == [0, 0]
    assert ledger.dims == (1, 7, 6)


def test_report_carries_per_degree(ctx3):
    W = Subspace.coordinate_span(ctx3, 3, [0])
    report = homology_report(canonical_hcomplex(3, W, 3).space)
    assert report.dims == [1, 1]
    assert report.to_json()["per_degree"] == [[1, 0, 0], [1, 0, 0]]


def test_q_commutation_error(ctx2):
    d = jordan_nilpotent(ctx2, [0, 1])
    with pytest.raises(QCommutationError):
        check_q_commutation(d, ExactMatrix.identity(ctx2, 2))


def test_invariance_violation(ctx2):
    W = Subspace.coordinate_span(ctx2, 2, [1])
    cc = canonical_hcomplex(2, W, 2)
    with pytest.raises(InvarianceViolationError) as e:
        induced_quotient_map(cc, shift_block(ctx2, 2))
    assert e.value.witness == W.basis[0]

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhomology.cyclo import field_new
from qhomology.errors import (AmbientMismatchError, ContainmentError, NotNilpotentError,
                              SingularMatrixError)
from qhomology.linalg import (STRATEGIES, ExactMatrix, Subspace, image_basis, inverse,
                              jordan_nilpotent, kernel_basis, nilpotency_index, nilpotent_profile,
                              random_nilpotent, random_unipotent, rank, restrict, rref, shift_block,
                              small_scalars, solve, subspace_ops)


def test_rank_and_kernel(ctx2):
    M = ExactMatrix.from_dense(ctx2, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(M) == 2
    K = kernel_basis(M)
    assert K.dim == 1
    assert not M.apply(K.basis[0])
    assert image_basis(M).dim == 2


def test_rank_with_field_entries(ctx3):
    q = ctx3.q
    M = ExactMatrix.from_dense(ctx3, [[1, q], [q, q * q]])
    assert rank(M) == 1
    assert rank(ExactMatrix.from_dense(ctx3, [[1, q], [q, 1]])) == 2


def test_shift_block(ctx2):
    Q = shift_block(ctx2, 4)
    assert [rank(Q.power(k)) for k in range(5)] == [4, 3, 2, 1, 0]
    assert nilpotency_index(Q) == 4


def test_jordan_profile(ctx3):
    N = jordan_nilpotent(ctx3, [2, 0, 3])
    profile = nilpotent_profile(N, 3)
    assert profile.dim == 11
    assert profile.ranks == (11, 6, 3, 0)
    assert profile.multiplicities == (2, 0, 3)


def test_profile_rejects_non_nilpotent(ctx2):
    with pytest.raises(NotNilpotentError) as e:
        nilpotent_profile(jordan_nilpotent(ctx2, [0, 0, 1]), 2)
    assert e.value.index == 3
    with pytest.raises(NotNilpotentError) as e:
        nilpotent_profile(ExactMatrix.identity(ctx2, 2), 2)
    assert e.value.index is None


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 7), st.integers(2, 4), st.integers(0, 10_000))
def test_random_nilpotent_has_the_drawn_profile(dim, h, seed):
    ctx = field_new(h)
    N, m = random_nilpotent(ctx, dim, h, random.Random(seed))
    assert sum((n + 1) * c for n, c in enumerate(m)) == dim
    assert list(nilpotent_profile(N, h).multiplicities) == m


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10_000))
def test_rank_of_transpose(rows, cols, seed):
    ctx = field_new(3)
    rng = random.Random(seed)
    alphabet = small_scalars(ctx)
    M = ExactMatrix.from_dense(ctx, [[rng.choice(alphabet) for _ in range(cols)] for _ in range(rows)])
    assert rank(M) == rank(M.T)
    assert rank(M) + kernel_basis(M).dim == cols


def test_strategies_agree(ctx3):
    rng = random.Random(7)
    alphabet = small_scalars(ctx3)
    rows = [{j: rng.choice(alphabet) for j in range(6)} for _ in range(5)]
    forms = [rref(rows, s) for s in STRATEGIES]
    assert all(f == forms[0] for f in forms)
    with pytest.raises(ValueError):
        rref(rows, "pivoting")


def test_solve(ctx2):
    M = ExactMatrix.from_dense(ctx2, [[1, 1, 0], [0, 1, 1]])
    x, null = solve(M, {0: ctx2.one, 1: ctx2.scalar(2)})
    assert M.apply(x) == {0: ctx2.one, 1: ctx2.scalar(2)}
    assert len(null) == 1 and not M.apply(null[0])
    inconsistent = ExactMatrix.from_dense(ctx2, [[1, 0], [1, 0]])
    assert solve(inconsistent, {0: ctx2.one}) == (None, [])


def test_inverse(ctx3):
    P = random_unipotent(ctx3, 5, random.Random(3))
    assert P @ inverse(P) == ExactMatrix.identity(ctx3, 5)
    with pytest.raises(SingularMatrixError):
        inverse(ExactMatrix.from_dense(ctx3, [[1, 2], [2, 4]]))
    with pytest.raises(SingularMatrixError):
        inverse(ExactMatrix.zeros(ctx3, 2, 3))


def test_subspace_operations(ctx2):
    one = ctx2.one
    U = Subspace.coordinate_span(ctx2, 4, [0, 1])
    V = Subspace.from_vectors(ctx2, 4, [{1: one, 2: one}, {3: one}])
    assert U.intersect(V).dim == 0
    assert U.sum(V).dim == 4
    assert subspace_ops(U, "sum", V) == Subspace.full(ctx2, 4)
    W = Subspace.from_vectors(ctx2, 4, [{0: one, 1: one}])
    assert subspace_ops(U, "contains", W)
    assert subspace_ops(U, "quotient_dim_mod", W) == 1
    assert U.intersect(W) == W
    assert U.completion(W).dim == 1
    with pytest.raises(ContainmentError):
        W.quotient_dim_mod(U)
    with pytest.raises(AmbientMismatchError):
        U.sum(Subspace.zero(ctx2, 3))
    with pytest.raises(AmbientMismatchError):
        Subspace.from_vectors(ctx2, 2, [{5: one}])


def test_subspace_equality_is_canonical(ctx3):
    q = ctx3.q
    a = Subspace.from_vectors(ctx3, 3, [{0: ctx3.one, 1: q}, {1: ctx3.one, 2: q}])
    b = Subspace.from_vectors(ctx3, 3, [{0: ctx3.one, 1: 2 * q, 2: q * q}, {1: q, 2: q * q}], "fraction_free")
    assert a == b
    assert a.basis == [{0: ctx3.one, 2: -q * q}, {1: ctx3.one, 2: q}]
    assert a != Subspace.from_vectors(ctx3, 3, [{0: ctx3.one}, {1: ctx3.one}])


def test_restrict(ctx2):
    N = jordan_nilpotent(ctx2, [0, 2])
    W = kernel_basis(N)
    assert restrict(N, W).is_zero()
    image = image_basis(N)
    assert restrict(N, image).shape == (2, 2)
    with pytest.raises(ContainmentError):
        restrict(N, Subspace.coordinate_span(ctx2, 4, [1]))


def test_json_form(ctx3):
    M = ExactMatrix.from_dense(ctx3, [[ctx3.q, 0], [0, -1]])
    assert ExactMatrix.from_json(M.to_json()) == M


def test_entries_that_cancel_are_dropped(ctx2):
    q = ctx2.q
    M = ExactMatrix.from_entries(ctx2, 2, 2, [(0, 0, q), (0, 0, -q), (1, 1, ctx2.one)])
    assert M.nnz == 1
    assert M == ExactMatrix.from_dense(ctx2, [[0, 0], [0, 1]])
    assert (M - M).is_zero()
    with pytest.raises(ValueError):
        ExactMatrix.from_entries(ctx2, 2, 2, [(2, 0, q)])


def test_stacking(ctx3):
    A = ExactMatrix.identity(ctx3, 2)
    B = ExactMatrix.from_dense(ctx3, [[ctx3.q], [0]])
    assert A.hstack(B).shape == (2, 3)
    assert A.hstack(B).entry(0, 2) == ctx3.q
    assert A.vstack(A).shape == (4, 2)
    with pytest.raises(ValueError):
        A.hstack(ExactMatrix.identity(ctx3, 3))


def test_unipotent_inverse_at_every_height():
    for h in (2, 3, 4, 5):
        ctx = field_new(h)
        P = random_unipotent(ctx, 4, random.Random(h))
        assert inverse(P) @ P == ExactMatrix.identity(ctx, 4)

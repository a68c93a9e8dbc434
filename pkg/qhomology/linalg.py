"""Exact sparse linear algebra over Q(zeta_{4h}).

Matrices are sparse sympy DomainMatrix objects over the field of their
FieldContext; vectors are dicts keyed by index holding only nonzero Scalars.
Elimination goes through DomainMatrix.rref, so every reduced form is the
canonical RREF whichever strategy produced it.
"""
import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .constants import ELIMINATION
from .cyclo import FieldContext, Scalar, field_new
from .errors import (AmbientMismatchError, ContainmentError, NotNilpotentError,
                     SingularMatrixError)

logger = logging.getLogger(__name__)

Vector = Dict[int, Scalar]

# elimination strategy -> DomainMatrix.rref method
METHODS = {"sparse": "GJ", "fraction_free": "FF"}
STRATEGIES = tuple(METHODS)


def _method(strategy: Optional[str]) -> str:
    strategy = strategy or ELIMINATION
    if strategy not in METHODS:
        raise ValueError(f"unknown elimination strategy {strategy!r}")
    return METHODS[strategy]


def vec_axpy(y: Vector, a: Scalar, x: Vector) -> Vector:
    """y += a*x in place, dropping entries that cancel."""
    if not a:
        return y
    for k, v in x.items():
        prev = y.get(k)
        t = a * v
        if prev is None:
            if t:
                y[k] = t
        else:
            s = prev + t
            if s:
                y[k] = s
            else:
                del y[k]
    return y


def vec_scale(x: Vector, a: Scalar) -> Vector:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def vec_add(x: Vector, y: Vector) -> Vector:
    if not y:
        return dict(x)
    return vec_axpy(dict(x), next(iter(y.values())).ctx.one, y)


def vec_sub(x: Vector, y: Vector) -> Vector:
    if not y:
        return dict(x)
    return vec_axpy(dict(x), -next(iter(y.values())).ctx.one, y)


def _wrap_row(ctx: FieldContext, row) -> Vector:
    return {j: Scalar(ctx, a) for j, a in row.items() if a}


def _dod(vectors: Iterable[Vector]) -> dict:
    """Field-element dict of dicts with one row per vector; zero entries dropped."""
    dod = {}
    for i, v in enumerate(vectors):
        row = {j: s.rep for j, s in v.items() if s}
        if row:
            dod[i] = row
    return dod


class ExactMatrix:
    """A rows x cols matrix over Q(zeta_{4h}), backed by a sparse DomainMatrix. Treated as immutable."""

    def __init__(self, ctx: FieldContext, rows: int, cols: int,
                 entries: Optional[Dict[int, Dict]] = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"negative matrix shape {rows}x{cols}")
        dod = {}
        for i, row in (entries or {}).items():
            kept = {j: ctx.element(v) for j, v in row.items() if v}
            if kept:
                dod[i] = kept
        self.ctx = ctx
        self._dm = DomainMatrix.from_dod(dod, (rows, cols), ctx.K)
        self._transpose: Optional[ExactMatrix] = None

    @classmethod
    def from_domain_matrix(cls, ctx: FieldContext, dm: DomainMatrix) -> "ExactMatrix":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._dm = dm.to_sparse()
        obj._transpose = None
        return obj

    @classmethod
    def _from_dod(cls, ctx, rows, cols, dod):
        return cls.from_domain_matrix(ctx, DomainMatrix.from_dod(dod, (rows, cols), ctx.K))

    @classmethod
    def zeros(cls, ctx, rows, cols=None):
        return cls._from_dod(ctx, rows, rows if cols is None else cols, {})

    @classmethod
    def identity(cls, ctx, n):
        return cls._from_dod(ctx, n, n, {i: {i: ctx.K.one} for i in range(n)})

    @classmethod
    def diagonal(cls, ctx, values: Sequence[Scalar]):
        return cls._from_dod(ctx, len(values), len(values), {i: {i: ctx.element(v)} for i, v in enumerate(values)})

    @classmethod
    def from_dense(cls, ctx, data: Sequence[Sequence]):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(ctx, rows, cols, {i: dict(enumerate(row)) for i, row in enumerate(data)})

    @classmethod
    def from_entries(cls, ctx, rows, cols, triples: Iterable[Tuple[int, int, Scalar]]):
        dod: Dict[int, Dict] = {}
        for i, j, v in triples:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            e = ctx.element(v)
            row = dod.setdefault(i, {})
            row[j] = row[j] + e if j in row else e
        dod = {i: {j: e for j, e in row.items() if e} for i, row in dod.items()}
        return cls._from_dod(ctx, rows, cols, {i: row for i, row in dod.items() if row})

    @classmethod
    def from_columns(cls, ctx, rows, columns: Sequence[Vector]):
        return cls.from_rows(ctx, rows, columns).transpose()

    @classmethod
    def from_rows(cls, ctx, cols, rows: Sequence[Vector]):
        return cls._from_dod(ctx, len(rows), cols, _dod(rows))

    @staticmethod
    def block_diag(ctx, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        dod = {}
        r0 = c0 = 0
        for b in blocks:
            for i, row in b._sdm.items():
                dod[r0 + i] = {c0 + j: v for j, v in row.items()}
            r0 += b.rows
            c0 += b.cols
        return ExactMatrix._from_dod(ctx, r0, c0, dod)

    @property
    def _sdm(self):
        return self._dm.rep

    @property
    def rows(self) -> int:
        return self._dm.shape[0]

    @property
    def cols(self) -> int:
        return self._dm.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._dm.shape

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._sdm.values())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.ctx, self._sdm.get(i, {}).get(j, self.ctx.K.zero))

    def __getitem__(self, key):
        i, j = key
        return self.entry(i, j)

    def row(self, i: int) -> Vector:
        return _wrap_row(self.ctx, self._sdm.get(i, {}))

    def row_items(self) -> List[Tuple[int, Vector]]:
        return [(i, _wrap_row(self.ctx, r)) for i, r in self._sdm.items() if r]

    def column(self, j: int) -> Vector:
        return self.transpose().row(j)

    def columns(self) -> List[Vector]:
        t = self.transpose()
        return [t.row(j) for j in range(self.cols)]

    def transpose(self) -> "ExactMatrix":
        if self._transpose is None:
            self._transpose = ExactMatrix.from_domain_matrix(self.ctx, self._dm.transpose())
            self._transpose._transpose = self
        return self._transpose

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def _check_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other)
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.add(other._dm))

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.neg())

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other)
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.sub(other._dm))

    def scale(self, s) -> "ExactMatrix":
        e = self.ctx.element(s)
        if not e:
            return ExactMatrix.zeros(self.ctx, self.rows, self.cols)
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.scalarmul(e))

    def __rmul__(self, s) -> "ExactMatrix":
        return self.scale(s)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.matmul(other._dm))

    def apply(self, v: Vector) -> Vector:
        """Matrix times sparse column vector."""
        columns = self.transpose()._sdm
        acc = {}
        for j, x in v.items():
            col = columns.get(j)
            if col and x:
                xr = x.rep
                for i, a in col.items():
                    t = a * xr
                    prev = acc.get(i)
                    acc[i] = t if prev is None else prev + t
        return _wrap_row(self.ctx, acc)

    def power(self, k: int) -> "ExactMatrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        result = ExactMatrix.identity(self.ctx, self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        dod = {}
        for i1, r1 in self._sdm.items():
            for i2, r2 in other._sdm.items():
                row = {}
                for j1, a in r1.items():
                    base = j1 * other.cols
                    for j2, b in r2.items():
                        row[base + j2] = a * b
                dod[i1 * other.rows + i2] = row
        return ExactMatrix._from_dod(self.ctx, self.rows * other.rows, self.cols * other.cols, dod)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.extract(list(row_indices), list(col_indices)))

    def vstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        for o in others:
            if o.cols != self.cols:
                raise ValueError("vstack with different column counts")
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.vstack(*(o._dm for o in others)))

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        for o in others:
            if o.rows != self.rows:
                raise ValueError("hstack with different row counts")
        return ExactMatrix.from_domain_matrix(self.ctx, self._dm.hstack(*(o._dm for o in others)))

    def is_zero(self) -> bool:
        return not any(self._sdm.values())

    def first_nonzero(self) -> Optional[Tuple[int, int]]:
        """(row, col) of the nonzero entry with the smallest column, then row."""
        best = None
        for i, row in self._sdm.items():
            if not row:
                continue
            j = min(row)
            if best is None or (j, i) < (best[1], best[0]):
                best = (i, j)
        return best

    def _canonical(self) -> dict:
        return {i: r for i, r in self._sdm.items() if r}

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.ctx.h == other.ctx.h and self._canonical() == other._canonical()

    def __hash__(self):
        return id(self)

    def to_dense(self) -> List[List[Scalar]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def to_json(self) -> dict:
        sdm = self._canonical()
        entries = [[i, j, Scalar(self.ctx, v).to_json()] for i in sorted(sdm) for j, v in sorted(sdm[i].items())]
        return {"h": self.ctx.h, "rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, data: dict, ctx: Optional[FieldContext] = None) -> "ExactMatrix":
        ctx = ctx or field_new(int(data["h"]))
        triples = ((int(i), int(j), Scalar.from_json(ctx, v)) for i, j, v in data["entries"])
        return cls.from_entries(ctx, int(data["rows"]), int(data["cols"]), triples)

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz}, h={self.ctx.h})"


def shift_block(ctx: FieldContext, n: int) -> ExactMatrix:
    """Q_n: the n x n nilpotent Jordan block with ones on the superdiagonal."""
    return ExactMatrix._from_dod(ctx, n, n, {i: {i + 1: ctx.K.one} for i in range(n - 1)})


def jordan_nilpotent(ctx: FieldContext, multiplicities: Sequence[int]) -> ExactMatrix:
    """Block-diagonal nilpotent with multiplicities[n-1] blocks of size n."""
    blocks = []
    for size, count in enumerate(multiplicities, start=1):
        if count < 0:
            raise ValueError(f"negative multiplicity for block size {size}")
        blocks.extend(shift_block(ctx, size) for _ in range(count))
    return ExactMatrix.block_diag(ctx, blocks)


# -- elimination ------------------------------------------------------------

def _rref_dm(M: ExactMatrix, strategy: Optional[str]) -> Tuple[DomainMatrix, List[int]]:
    method = _method(strategy)
    if M.is_zero():
        return M._dm, []
    R, pivots = M._dm.rref(method=method)
    return R.to_sparse(), list(pivots)


def _rows_by_pivot(ctx: FieldContext, R: DomainMatrix, pivots: List[int]) -> List[Vector]:
    by_pivot = {min(r): r for r in R.rep.values() if r}
    return [_wrap_row(ctx, by_pivot[p]) for p in pivots]


def _null_vectors(ctx: FieldContext, R: DomainMatrix, pivots: List[int]) -> List[Vector]:
    """Nullspace basis of a matrix already in RREF, one vector per free column."""
    N = R.nullspace_from_rref(pivots).to_sparse()
    return [_wrap_row(ctx, N.rep[i]) for i in sorted(N.rep) if N.rep[i]]


def rref(rows: Iterable[Vector], strategy: Optional[str] = None) -> Tuple[List[Vector], List[int]]:
    """Canonical reduced row echelon form: rows sorted by pivot, pivots equal to one."""
    _method(strategy)
    rows = [r for r in rows if r]
    if not rows:
        return [], []
    ctx = next(iter(rows[0].values())).ctx
    ncols = 1 + max(max(r) for r in rows)
    M = ExactMatrix.from_rows(ctx, ncols, rows)
    R, pivots = _rref_dm(M, strategy)
    return _rows_by_pivot(ctx, R, pivots), pivots


def rank(M: ExactMatrix, strategy: Optional[str] = None) -> int:
    return len(_rref_dm(M, strategy)[1])


def kernel_basis(M: ExactMatrix, strategy: Optional[str] = None) -> "Subspace":
    R, pivots = _rref_dm(M, strategy)
    if not pivots:
        return Subspace.full(M.ctx, M.cols)
    return Subspace.from_vectors(M.ctx, M.cols, _null_vectors(M.ctx, R, pivots), strategy)


def image_basis(M: ExactMatrix, strategy: Optional[str] = None) -> "Subspace":
    return Subspace.from_vectors(M.ctx, M.rows, M.columns(), strategy)


def solve(M: ExactMatrix, b: Vector, strategy: Optional[str] = None) -> Tuple[Optional[Vector], List[Vector]]:
    """Solve M x = b. Returns (particular solution or None if inconsistent, nullspace basis)."""
    ctx, n = M.ctx, M.cols
    augmented = M.hstack(ExactMatrix.from_columns(ctx, M.rows, [b]))
    R, pivots = _rref_dm(augmented, strategy)
    if pivots and pivots[-1] == n:
        return None, []
    reduced = _rows_by_pivot(ctx, R, pivots)
    particular = {p: r[n] for p, r in zip(pivots, reduced) if n in r}
    homogeneous = R.extract(list(range(R.shape[0])), list(range(n)))
    if not pivots:
        return particular, [{j: ctx.one} for j in range(n)]
    return particular, _null_vectors(ctx, homogeneous, pivots)


def inverse(M: ExactMatrix) -> ExactMatrix:
    if not M.is_square():
        raise SingularMatrixError(f"non-square {M.shape} matrix has no inverse")
    if M.rows == 0:
        return M
    try:
        return ExactMatrix.from_domain_matrix(M.ctx, M._dm.inv())
    except DMNonInvertibleMatrixError:
        raise SingularMatrixError("matrix is singular")


class Subspace:
    """A subspace of ctx^ambient_dim held as its canonical RREF basis."""

    def __init__(self, ctx: FieldContext, ambient_dim: int, basis: List[Vector], pivots: List[int]):
        self.ctx = ctx
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_vectors(cls, ctx, ambient_dim, vectors: Iterable[Vector], strategy: Optional[str] = None) -> "Subspace":
        vectors = list(vectors)
        for v in vectors:
            if v and (min(v) < 0 or max(v) >= ambient_dim):
                raise AmbientMismatchError(f"vector index outside ambient dimension {ambient_dim}")
        basis, pivots = rref(vectors, strategy)
        return cls(ctx, ambient_dim, basis, pivots)

    @classmethod
    def zero(cls, ctx, n):
        return cls(ctx, n, [], [])

    @classmethod
    def full(cls, ctx, n):
        return cls(ctx, n, [{i: ctx.one} for i in range(n)], list(range(n)))

    @classmethod
    def coordinate_span(cls, ctx, n, indices: Iterable[int]):
        idx = sorted(set(indices))
        return cls(ctx, n, [{i: ctx.one} for i in idx], idx)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Vector) -> Vector:
        """Residue of v modulo the subspace; zero at every pivot."""
        r = dict(v)
        for p, b in zip(self.pivots, self.basis):
            c = v.get(p)
            if c:
                vec_axpy(r, -c, b)
        return r

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def coordinates(self, v: Vector) -> List[Scalar]:
        """Coefficients of v in the echelon basis."""
        if not self.contains(v):
            raise ContainmentError("vector is not in the subspace")
        return [v.get(p, self.ctx.zero) for p in self.pivots]

    def _check_ambient(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatchError(f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(self.contains(v) for v in other.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.from_vectors(self.ctx, self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        if not self.basis or not other.basis:
            return Subspace.zero(self.ctx, self.ambient_dim)
        residues = [other.reduce(v) for v in self.basis]
        R = ExactMatrix.from_columns(self.ctx, self.ambient_dim, residues)
        vectors = []
        for alpha in kernel_basis(R).basis:
            v: Vector = {}
            for i, a in alpha.items():
                vec_axpy(v, a, self.basis[i])
            vectors.append(v)
        return Subspace.from_vectors(self.ctx, self.ambient_dim, vectors)

    def quotient_dim_mod(self, other: "Subspace") -> int:
        """dim(self / other); requires other inside self."""
        if not self.contains_subspace(other):
            raise ContainmentError("quotient requires the second subspace inside the first")
        return self.dim - other.dim

    def completion(self, inner: "Subspace") -> "Subspace":
        """Span of the basis vectors of self that extend inner's echelon basis."""
        self._check_ambient(inner)
        current = inner
        chosen = []
        for v in self.basis:
            if not current.contains(v):
                chosen.append(v)
                current = Subspace.from_vectors(self.ctx, self.ambient_dim, current.basis + [v])
        return Subspace.from_vectors(self.ctx, self.ambient_dim, chosen)

    def basis_matrix(self) -> ExactMatrix:
        return ExactMatrix.from_columns(self.ctx, self.ambient_dim, self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.pivots == other.pivots and self.basis == other.basis

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def subspace_ops(a: Subspace, op: str, b: Subspace):
    """Dispatch intersect, sum, contains, quotient_dim_mod."""
    a._check_ambient(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "sum":
        return a.sum(b)
    if op == "contains":
        return a.contains_subspace(b)
    if op == "quotient_dim_mod":
        return a.quotient_dim_mod(b)
    raise ValueError(f"unknown subspace operation {op!r}")


def restrict(M: ExactMatrix, W: Subspace) -> ExactMatrix:
    """Matrix of M restricted to the M-invariant subspace W, in W's echelon basis."""
    columns = []
    for w in W.basis:
        image = M.apply(w)
        if not W.contains(image):
            raise ContainmentError("subspace is not invariant under the matrix")
        columns.append({i: c for i, c in enumerate(W.coordinates(image)) if c})
    return ExactMatrix.from_columns(M.ctx, W.dim, columns)


@dataclass(frozen=True)
class NilpotentProfile:
    h: int
    ranks: Tuple[int, ...]
    multiplicities: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.ranks[0]


def nilpotency_index(N: ExactMatrix, limit: Optional[int] = None) -> Optional[int]:
    """Smallest j with N^j = 0, or None when the rank sequence stalls above zero."""
    limit = N.rows if limit is None else limit
    power = ExactMatrix.identity(N.ctx, N.rows)
    previous = N.rows
    for j in range(1, limit + 1):
        power = power @ N
        if power.is_zero():
            return j
        r = rank(power)
        if r == previous:
            return None
        previous = r
    return None


def nilpotent_profile(N: ExactMatrix, h: int) -> NilpotentProfile:
    """Ranks of N^0..N^h and the Jordan block multiplicities m_1..m_h."""
    if not N.is_square():
        raise ValueError(f"nilpotent profile needs a square matrix, got {N.shape}")
    ranks = [N.rows]
    power = ExactMatrix.identity(N.ctx, N.rows)
    for _ in range(h):
        power = power @ N
        ranks.append(rank(power))
    if not power.is_zero():
        raise NotNilpotentError(h, nilpotency_index(N))
    padded = ranks + [0]
    multiplicities = tuple(padded[n - 1] - 2 * padded[n] + padded[n + 1] for n in range(1, h + 1))
    logger.debug("nilpotent profile: ranks %s, multiplicities %s", ranks, multiplicities)
    return NilpotentProfile(h, tuple(ranks), multiplicities)


def small_scalars(ctx: FieldContext) -> List[Scalar]:
    """The sampling alphabet {0, +-1, +-q, +-q^-1}."""
    q, qi = ctx.q, ctx.q_power(-1)
    return [ctx.zero, ctx.one, -ctx.one, q, -q, qi, -qi]


def random_multiplicities(dim: int, h: int, rng: random.Random) -> List[int]:
    """Random Jordan type of total size dim with block sizes at most h."""
    m = [0] * h
    left = dim
    while left:
        size = rng.randint(1, min(h, left))
        m[size - 1] += 1
        left -= size
    return m


def random_unipotent(ctx: FieldContext, n: int, rng: random.Random) -> ExactMatrix:
    alphabet = small_scalars(ctx)
    lower = {i: {i: ctx.one, **{j: rng.choice(alphabet) for j in range(i)}} for i in range(n)}
    upper = {i: {i: ctx.one, **{j: rng.choice(alphabet) for j in range(i + 1, n)}} for i in range(n)}
    return ExactMatrix(ctx, n, n, lower) @ ExactMatrix(ctx, n, n, upper)


def random_nilpotent(ctx: FieldContext, dim: int, h: int, rng: random.Random) -> Tuple[ExactMatrix, List[int]]:
    """P J P^-1 for a random Jordan type J with N^h = 0 and a random unipotent P."""
    m = random_multiplicities(dim, h, rng)
    J = jordan_nilpotent(ctx, m)
    P = random_unipotent(ctx, dim, rng)
    return P @ J @ inverse(P), m

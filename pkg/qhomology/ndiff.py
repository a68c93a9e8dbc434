"""h-differential vector spaces and their generalized homology.

A space (E, d) with d^h = 0 has homologies H_(k) = Ker(d^k)/Im(d^(h-k)) for
k = 1..h-1. This module computes them by rank, relates them to the Jordan
type of d, and builds the graded constructions used by the zero-mode complex:
the cone over a nilpotent L and the canonical h-complex V -> V/W -> ... -> V/W.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cyclo import FieldContext
from .errors import (ContainmentError, InvarianceViolationError, NotNilpotentError,
                     QCommutationError, QHomologyError)
from .linalg import (ExactMatrix, Subspace, image_basis, jordan_nilpotent, kernel_basis,
                     nilpotency_index, nilpotent_profile, rank, restrict)

logger = logging.getLogger(__name__)


@dataclass
class HDiffSpace:
    """A vector space of dimension ``dim`` with an h-differential ``d``.

    ``grading`` lists component dimensions when d has degree +1. ``filtration``
    keeps the component boundaries of a graded space after d has been deformed
    into an ungraded differential.
    """
    h: int
    dim: int
    d: ExactMatrix
    grading: Optional[Tuple[int, ...]] = None
    filtration: Optional[Tuple[int, ...]] = None
    _powers: Dict[int, ExactMatrix] = field(default_factory=dict, repr=False, compare=False)
    _ranks: Dict[int, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.d.shape != (self.dim, self.dim):
            raise ValueError(f"differential has shape {self.d.shape}, expected {self.dim}x{self.dim}")
        if self.grading is not None and sum(self.grading) != self.dim:
            raise ValueError(f"grading {self.grading} does not add up to {self.dim}")

    @property
    def ctx(self) -> FieldContext:
        return self.d.ctx

    def power(self, k: int) -> ExactMatrix:
        if k not in self._powers:
            if k == 0:
                self._powers[0] = ExactMatrix.identity(self.ctx, self.dim)
            else:
                self._powers[k] = self.power(k - 1) @ self.d
        return self._powers[k]

    def rank_of_power(self, k: int) -> int:
        if k not in self._ranks:
            self._ranks[k] = rank(self.power(k))
        return self._ranks[k]

    def check_nilpotent(self):
        if not self.power(self.h).is_zero():
            raise NotNilpotentError(self.h, nilpotency_index(self.d), what="differential")

    def offsets(self, components: Optional[Sequence[int]] = None) -> List[int]:
        components = components if components is not None else (self.grading or self.filtration)
        if components is None:
            raise QHomologyError("space carries neither grading nor filtration")
        out = [0]
        for c in components:
            out.append(out[-1] + c)
        return out


@dataclass
class HomologyReport:
    h: int
    dims: List[int]
    representatives: Optional[List[Subspace]] = None
    per_degree: Optional[List[List[int]]] = None

    def to_json(self) -> dict:
        data = {"h": self.h, "dims": list(self.dims)}
        if self.per_degree is not None:
            data["per_degree"] = [list(row) for row in self.per_degree]
        return data


def _check_k(space: HDiffSpace, k: int):
    if not 1 <= k <= space.h - 1:
        raise QHomologyError(f"homology index k={k} outside 1..{space.h - 1}")


def gen_homology(space: HDiffSpace, k: int, representatives: bool = True) -> Tuple[int, Optional[Subspace]]:
    """dim H_(k) and, when asked, the echelon completion of Im(d^(h-k)) inside Ker(d^k)."""
    _check_k(space, k)
    space.check_nilpotent()
    if not representatives:
        dim = space.dim - space.rank_of_power(k) - space.rank_of_power(space.h - k)
        return dim, None
    ker = kernel_basis(space.power(k))
    im = image_basis(space.power(space.h - k))
    if not ker.contains_subspace(im):
        raise ContainmentError(f"Im(d^{space.h - k}) is not inside Ker(d^{k})")
    reps = ker.completion(im)
    logger.debug("H_(%d): ker %d, im %d", k, ker.dim, im.dim)
    return ker.dim - im.dim, reps


def per_degree_homology(space: HDiffSpace, k: int) -> List[int]:
    """dim H^n_(k) for each degree n of a graded space."""
    _check_k(space, k)
    if space.grading is None:
        raise QHomologyError("per-degree homology needs a graded space")
    space.check_nilpotent()
    offs = space.offsets(space.grading)
    degrees = len(space.grading)
    dk = space.power(k)
    dhk = space.power(space.h - k)
    dims = []
    for n in range(degrees):
        cols = list(range(offs[n], offs[n + 1]))
        if n + k < degrees:
            rows = list(range(offs[n + k], offs[n + k + 1]))
            ker = len(cols) - rank(dk.submatrix(rows, cols))
        else:
            ker = len(cols)
        src = n - (space.h - k)
        if src >= 0:
            im = rank(dhk.submatrix(cols, list(range(offs[src], offs[src + 1]))))
        else:
            im = 0
        dims.append(ker - im)
    return dims


def homology_report(space: HDiffSpace, representatives: bool = False) -> HomologyReport:
    dims, reps = [], []
    for k in range(1, space.h):
        dim, rep = gen_homology(space, k, representatives=representatives)
        dims.append(dim)
        reps.append(rep)
    per_degree = None
    if space.grading is not None:
        per_degree = [per_degree_homology(space, k) for k in range(1, space.h)]
    return HomologyReport(space.h, dims, reps if representatives else None, per_degree)


def homology_dims_from_multiplicities(m: Sequence[int], h: int) -> List[int]:
    """dim H_(n) from Jordan multiplicities m_1..m_h.

    For n <= h/2 this is the sum over j = 1..n of m_j + ... + m_(h-j); the
    remaining n follow from dim H_(n) = dim H_(h-n).
    """
    if len(m) != h:
        raise ValueError(f"expected {h} multiplicities, got {len(m)}")
    if any(x < 0 for x in m):
        raise ValueError(f"negative multiplicity in {list(m)}")
    dims = [0] * h
    for n in range(1, h // 2 + 1):
        dims[n] = sum(m[i - 1] for j in range(1, n + 1) for i in range(j, h - j + 1))
    for n in range(h // 2 + 1, h):
        dims[n] = dims[h - n]
    return dims[1:]


@dataclass
class Feasibility:
    dim: int
    h: int
    feasible: bool
    witnesses: List[List[int]]

    def to_json(self) -> dict:
        return {"dim": self.dim, "h": self.h, "feasible": self.feasible, "witnesses": self.witnesses}


def feasibility(dim_total: int, h: int) -> Feasibility:
    """Can a nilpotent Q with Q^h = 0 on dim_total dimensions have every H_(n) one-dimensional?

    Only the families m_1 = 1 or m_(h-1) = 1, padded with full blocks of size h, qualify.
    """
    if dim_total < 0:
        raise ValueError(f"negative dimension {dim_total}")
    if h < 2:
        raise ValueError(f"height must be >= 2, got {h}")
    witnesses = []
    for small in (1, h - 1):
        rest = dim_total - small
        if rest >= 0 and rest % h == 0:
            m = [0] * h
            m[small - 1] += 1
            m[h - 1] += rest // h
            if m not in witnesses:
                witnesses.append(m)
    return Feasibility(dim_total, h, bool(witnesses), witnesses)


def witness_space(ctx: FieldContext, multiplicities: Sequence[int]) -> HDiffSpace:
    d = jordan_nilpotent(ctx, multiplicities)
    return HDiffSpace(len(multiplicities), d.rows, d)


def cone(E_dim: int, L: ExactMatrix, h: int) -> HDiffSpace:
    """h copies of E in degrees 0..h-1 with (delta + L')psi_n = psi_(n-1) + q^(2n) L psi_n."""
    if L.shape != (E_dim, E_dim):
        raise ValueError(f"L has shape {L.shape}, expected {E_dim}x{E_dim}")
    if not L.power(h).is_zero():
        raise NotNilpotentError(h, nilpotency_index(L), what="L")
    ctx = L.ctx
    triples = []
    for n in range(h):
        base = n * E_dim
        if n:
            triples.extend((base + i, base - E_dim + i, ctx.one) for i in range(E_dim))
        s = ctx.q_power(2 * n)
        for i, row in L.row_items():
            triples.extend((base + i, base + j, s * v) for j, v in row.items())
    d = ExactMatrix.from_entries(ctx, h * E_dim, h * E_dim, triples)
    space = HDiffSpace(h, h * E_dim, d, filtration=(E_dim,) * h)
    space.check_nilpotent()
    return space


@dataclass
class CanonicalComplex:
    """V in degree 0 followed by h-1 copies of V/W, with d = projection, identities, 0."""
    space: HDiffSpace
    W: Subspace
    complement: List[int]
    projection: ExactMatrix
    embedding: ExactMatrix

    @property
    def quotient_dim(self) -> int:
        return len(self.complement)


def quotient_projection(W: Subspace) -> Tuple[List[int], ExactMatrix]:
    """Coordinates on V/W given by the non-pivot columns of W's echelon basis."""
    ctx = W.ctx
    pivot_set = set(W.pivots)
    complement = [j for j in range(W.ambient_dim) if j not in pivot_set]
    position = {j: n for n, j in enumerate(complement)}
    columns: List[dict] = [{} for _ in range(W.ambient_dim)]
    for j in complement:
        columns[j] = {position[j]: ctx.one}
    for p, b in zip(W.pivots, W.basis):
        columns[p] = {position[j]: -v for j, v in b.items() if j != p}
    return complement, ExactMatrix.from_columns(ctx, len(complement), columns)


def canonical_hcomplex(ambient_dim: int, W: Subspace, h: int, verify: bool = True) -> CanonicalComplex:
    if W.ambient_dim != ambient_dim:
        raise ContainmentError(f"subspace lives in dimension {W.ambient_dim}, not {ambient_dim}")
    ctx = W.ctx
    complement, pi = quotient_projection(W)
    c = len(complement)
    grading = (ambient_dim,) + (c,) * (h - 1)
    total = ambient_dim + (h - 1) * c
    triples = []
    for i, row in pi.row_items():
        triples.extend((ambient_dim + i, j, v) for j, v in row.items())
    for n in range(1, h - 1):
        src = ambient_dim + (n - 1) * c
        triples.extend((src + c + i, src + i, ctx.one) for i in range(c))
    d = ExactMatrix.from_entries(ctx, total, total, triples)
    embedding = ExactMatrix.from_entries(ctx, total, ambient_dim, ((i, i, ctx.one) for i in range(ambient_dim)))
    space = HDiffSpace(h, total, d, grading=grading)
    space.check_nilpotent()
    cc = CanonicalComplex(space, W, complement, pi, embedding)
    if verify:
        verify_canonical_homology(cc)
    logger.info("canonical %d-complex: degree dims %s", h, grading)
    return cc


def verify_canonical_homology(cc: CanonicalComplex) -> List[List[int]]:
    """H^n_(k) vanishes for n >= 1 and H^0_(k) is W; returns the per-degree table."""
    space = cc.space
    table = []
    for k in range(1, space.h):
        dims = per_degree_homology(space, k)
        if dims[0] != cc.W.dim or any(dims[1:]):
            raise QHomologyError(f"canonical complex has H_({k}) per degree {dims}, expected W in degree 0 only")
        table.append(dims)
    return table


def induced_quotient_map(cc: CanonicalComplex, A0: ExactMatrix) -> ExactMatrix:
    """The map V/W -> V/W induced by A0; requires A0(W) inside W."""
    W = cc.W
    for w in W.basis:
        image = A0.apply(w)
        residue = W.reduce(image)
        if residue:
            raise InvarianceViolationError("endomorphism does not preserve the subspace", witness=w)
    lifted = [A0.column(j) for j in cc.complement]
    return ExactMatrix.from_columns(A0.ctx, cc.quotient_dim, [cc.projection.apply(v) for v in lifted])


def extend_endomorphism(cc: CanonicalComplex, A0: ExactMatrix) -> ExactMatrix:
    """Degree-0 extension: A0 on V and q^(2n) times the induced map on the n-th copy of V/W."""
    space = cc.space
    h = space.h
    if not A0.power(h).is_zero():
        raise NotNilpotentError(h, nilpotency_index(A0), what="A0")
    Abar = induced_quotient_map(cc, A0)
    blocks = [A0] + [Abar.scale(A0.ctx.q_power(2 * n)) for n in range(1, h)]
    A = ExactMatrix.block_diag(A0.ctx, blocks)
    check_q_commutation(space.d, A)
    return A


def check_q_commutation(d: ExactMatrix, A: ExactMatrix):
    defect = A @ d - (d @ A).scale(d.ctx.q_power(2))
    if not defect.is_zero():
        raise QCommutationError(f"A d - q^2 d A is nonzero at entry {defect.first_nonzero()}")


def total_differential(space: HDiffSpace, A: ExactMatrix) -> HDiffSpace:
    """Q = d + A, ungraded, keeping the grading of ``space`` as its filtration."""
    check_q_commutation(space.d, A)
    if not A.power(space.h).is_zero():
        raise NotNilpotentError(space.h, nilpotency_index(A), what="A")
    total = HDiffSpace(space.h, space.dim, space.d + A, filtration=space.grading)
    total.check_nilpotent()
    return total


def restrict_to_subspace(space: HDiffSpace, W: Subspace) -> HDiffSpace:
    """(W, d|W) in W's echelon basis."""
    return HDiffSpace(space.h, W.dim, restrict(space.d, W))


@dataclass
class ExactSequenceLedger:
    """Dimension bookkeeping for 0 -> (W, A0) -> (H., Q) -> cone(V/W, induced A) -> 0."""
    h: int
    sub_dims: List[int]
    total_dims: List[int]
    cone_dims: List[int]
    dims: Tuple[int, int, int]

    @property
    def balanced(self) -> bool:
        return (self.total_dims == self.sub_dims and not any(self.cone_dims)
                and self.dims[1] == self.dims[0] + self.dims[2])

    def to_json(self) -> dict:
        return {"h": self.h, "sub": self.sub_dims, "total": self.total_dims,
                "cone": self.cone_dims, "dims": list(self.dims), "balanced": self.balanced}


def exact_sequence_ledger(V_dim: int, W: Subspace, A0: ExactMatrix, h: int) -> ExactSequenceLedger:
    cc = canonical_hcomplex(V_dim, W, h, verify=False)
    A = extend_endomorphism(cc, A0)
    total = total_differential(cc.space, A)
    sub = restrict_to_subspace(HDiffSpace(h, V_dim, A0), W)
    quotient = cone(cc.quotient_dim, induced_quotient_map(cc, A0), h)
    ledger = ExactSequenceLedger(
        h,
        [gen_homology(sub, k, representatives=False)[0] for k in range(1, h)],
        [gen_homology(total, k, representatives=False)[0] for k in range(1, h)],
        [gen_homology(quotient, k, representatives=False)[0] for k in range(1, h)],
        (sub.dim, total.dim, quotient.dim),
    )
    logger.debug("exact sequence ledger: %s", ledger.to_json())
    return ledger


def profile_homology(N: ExactMatrix, h: int) -> Tuple[List[int], List[int]]:
    """(multiplicities, dims predicted from them) for the nilpotent N."""
    profile = nilpotent_profile(N, h)
    return list(profile.multiplicities), homology_dims_from_multiplicities(profile.multiplicities, h)

"""Zero-mode model of the SU(2) WZNW model at height h.

Builds the Fock modules F and F-bar, the chiral zero modes a^i_alpha and
abar^alpha_i as matrices, the two-copy quantum group action with its
coproduct, the bilinears A, A', B, B' on H = F (x) F-bar, and the invariant
subspace H_I with its canonical basis |n>_I.

Raising operators come straight from the basis definition. Lowering operators
are the unique solution of the linear system formed by the determinant
condition, the exchange relations that are linear in them and the vacuum
condition; everything is re-verified afterwards by the relation catalogue.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cyclo import FieldContext, Scalar, field_new, q_divided_power_coeff, q_int
from .errors import ExpectationError, InvalidHeightError, ModelConstructionError
from .linalg import (ExactMatrix, Subspace, Vector, kernel_basis, nilpotent_profile,
                     solve, vec_axpy, vec_scale, vec_sub)
from .ndiff import HDiffSpace, gen_homology, homology_dims_from_multiplicities, restrict_to_subspace
from .report import Check, SuiteReport, identity_check

logger = logging.getLogger(__name__)

PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))
SIGN = {(1, 2): -1, (2, 1): 1}

Op = Callable[[int, int], ExactMatrix]


@dataclass(frozen=True)
class FockIndex:
    p: int
    m: int

    @property
    def n(self) -> int:
        return self.p - 1 - self.m

    def __str__(self) -> str:
        return f"|{self.p},{self.m}>"


def fock_basis(h: int) -> List[FockIndex]:
    """|p,m> = (a^1_1)^m (a^1_2)^(p-1-m)|1,0>, ordered by (p, m)."""
    if isinstance(h, bool) or not isinstance(h, int) or h < 2:
        raise InvalidHeightError(h)
    return [FockIndex(p, m)
            for p in range(1, 2 * h)
            for m in range(max(0, p - h), min(p - 1, h - 1) + 1)]


# -- constant tensors -----------------------------------------------------

def eps_tensor(ctx: FieldContext) -> Dict[Tuple[int, int], Scalar]:
    """Nonzero entries of E_{alpha beta} (equal to E^{alpha beta})."""
    return {(1, 2): -ctx.zeta, (2, 1): ctx.zeta_power(-1)}


def antisymmetrizer(ctx: FieldContext) -> ExactMatrix:
    """The 4x4 matrix A^{s1 s2}_{a1 a2} = E^{s1 s2} E_{a1 a2}, rows and columns in PAIRS order."""
    E = eps_tensor(ctx)
    triples = []
    for r, s in enumerate(PAIRS):
        for c, a in enumerate(PAIRS):
            if s in E and a in E:
                triples.append((r, c, E[s] * E[a]))
    return ExactMatrix.from_entries(ctx, 4, 4, triples)


def dynamic_numerator(ctx: FieldContext, p: int) -> ExactMatrix:
    """[p] A(p) = [p+i1-i2] (delta^{i1 i2}_{j1 j2} - delta^{i1 i2}_{j2 j1})."""
    triples = []
    for r, (i1, i2) in enumerate(PAIRS):
        if i1 == i2:
            continue
        coeff = q_int(ctx, p + i1 - i2)
        triples.append((r, PAIRS.index((i1, i2)), coeff))
        triples.append((r, PAIRS.index((i2, i1)), -coeff))
    return ExactMatrix.from_entries(ctx, 4, 4, triples)


def tensor_checks(ctx: FieldContext) -> List[Check]:
    """Hecke and braiding identities of the two antisymmetrizers."""
    h = ctx.h
    calA = antisymmetrizer(ctx)
    two = q_int(ctx, 2)
    I2 = ExactMatrix.identity(ctx, 2)
    checks = [identity_check("tensor.hecke", calA @ calA - calA.scale(two))]
    A12 = calA.kron(I2)
    A23 = I2.kron(calA)
    checks.append(identity_check("tensor.braiding.12", A12 @ A23 @ A12 - A12))
    checks.append(identity_check("tensor.braiding.23", A23 @ A12 @ A23 - A23))
    for p in range(1, 2 * h):
        N = dynamic_numerator(ctx, p)
        checks.append(identity_check(f"tensor.hecke_p.{p}", N @ N - N.scale(two * q_int(ctx, p))))
    return checks


# -- chiral operators -----------------------------------------------------

def _index(basis: Sequence[FockIndex]) -> Dict[Tuple[int, int], int]:
    return {(b.m, b.n): i for i, b in enumerate(basis)}


def raising_ops(ctx: FieldContext, basis: Sequence[FockIndex]) -> Dict[int, ExactMatrix]:
    """a^1_1|m,n> = |m+1,n> and a^1_2|m,n> = q^m|m,n+1>, zero past the boundary."""
    index = _index(basis)
    dim = len(basis)
    ones, twos = [], []
    for j, b in enumerate(basis):
        t = index.get((b.m + 1, b.n))
        if t is not None:
            ones.append((t, j, ctx.one))
        t = index.get((b.m, b.n + 1))
        if t is not None:
            twos.append((t, j, ctx.q_power(b.m)))
    return {1: ExactMatrix.from_entries(ctx, dim, dim, ones), 2: ExactMatrix.from_entries(ctx, dim, dim, twos)}


class _LoweringSystem:
    """Linear equations in the unknown entries of a^2_1, a^2_2.

    Unknowns sit only at positions lowering p by one; the vacuum column has
    none, so a^2_alpha|1,0> = 0 holds identically.
    """

    def __init__(self, ctx: FieldContext, basis: Sequence[FockIndex]):
        self.ctx = ctx
        self.dim = len(basis)
        self.variables: List[Tuple[int, int, int]] = []
        self.by_source: Dict[int, Dict[int, List[Tuple[int, int]]]] = {1: {}, 2: {}}
        self.by_target: Dict[int, Dict[int, List[Tuple[int, int]]]] = {1: {}, 2: {}}
        for alpha in (1, 2):
            for s, bs in enumerate(basis):
                for t, bt in enumerate(basis):
                    if bt.p == bs.p - 1:
                        var = len(self.variables)
                        self.variables.append((alpha, t, s))
                        self.by_source[alpha].setdefault(s, []).append((t, var))
                        self.by_target[alpha].setdefault(t, []).append((s, var))
        self.rows: Dict[Tuple[str, int, int], Vector] = {}
        self.rhs: Dict[Tuple[str, int, int], Scalar] = {}

    def _add(self, key, var, value):
        row = self.rows.setdefault(key, {})
        vec_axpy(row, value, {var: self.ctx.one})

    def known_times_unknown(self, tag, K: ExactMatrix, alpha: int, coeff: Scalar, diag: Sequence[Scalar]):
        Kt = K.transpose()
        for s, targets in self.by_source[alpha].items():
            for k, var in targets:
                for r, v in Kt.row(k).items():
                    self._add((tag, r, s), var, coeff * v * diag[r])

    def unknown_times_known(self, tag, alpha: int, K: ExactMatrix, coeff: Scalar, diag: Sequence[Scalar]):
        for r, sources in self.by_target[alpha].items():
            for k, var in sources:
                for c, v in K.row(k).items():
                    self._add((tag, r, c), var, coeff * v * diag[r])

    def constant(self, tag, C: ExactMatrix):
        """Adds C to the left-hand side, i.e. -C to the right."""
        for r, row in C.row_items():
            for c, v in row.items():
                key = (tag, r, c)
                self.rows.setdefault(key, {})
                self.rhs[key] = self.rhs.get(key, self.ctx.zero) - v

    def solve(self) -> Dict[int, ExactMatrix]:
        keys = sorted(set(self.rows) | set(self.rhs))
        position = {k: n for n, k in enumerate(keys)}
        M = ExactMatrix(self.ctx, len(keys), len(self.variables), {position[k]: r for k, r in self.rows.items()})
        b = {position[k]: v for k, v in self.rhs.items() if v}
        logger.debug("lowering-operator system: %d equations, %d unknowns", len(keys), len(self.variables))
        particular, nullspace = solve(M, b)
        if particular is None:
            raise ModelConstructionError("lowering-operator constraint system is inconsistent")
        if nullspace:
            raise ModelConstructionError(
                f"lowering-operator constraint system is under-determined: {len(nullspace)}-parameter solution family")
        entries = {1: [], 2: []}
        for var, value in particular.items():
            alpha, t, s = self.variables[var]
            entries[alpha].append((t, s, value))
        return {alpha: ExactMatrix.from_entries(self.ctx, self.dim, self.dim, entries[alpha]) for alpha in (1, 2)}


def build_chiral_ops(h: int) -> Tuple[Dict[Tuple[int, int], ExactMatrix], Dict[Tuple[int, int], ExactMatrix]]:
    """a[(i, alpha)] on F and abar[(alpha, i)] on F-bar."""
    ctx = field_new(h)
    basis = fock_basis(h)
    up = raising_ops(ctx, basis)
    ps = [b.p for b in basis]
    qp = [q_int(ctx, p) for p in ps]
    calA = antisymmetrizer(ctx)
    E = eps_tensor(ctx)
    one = ctx.one

    system = _LoweringSystem(ctx, basis)
    for alpha, beta in PAIRS:
        tag = f"det{alpha}{beta}"
        system.unknown_times_known(tag, alpha, up[beta], one, [one] * len(basis))
        system.known_times_unknown(tag, up[alpha], beta, -one, [one] * len(basis))
        if (alpha, beta) in E:
            system.constant(tag, ExactMatrix.diagonal(ctx, [-E[(alpha, beta)] * v for v in qp]))
    for a1, a2 in PAIRS:
        col = PAIRS.index((a1, a2))
        # (i1, i2) = (1, 2): [p] L = [p-1] R
        tag = f"exchange12.{a1}{a2}"
        shifted = [q_int(ctx, p - 1) for p in ps]
        for row, (s1, s2) in enumerate(PAIRS):
            c = calA.entry(row, col)
            if c:
                system.known_times_unknown(tag, up[s1], s2, c, qp)
        system.known_times_unknown(tag, up[a1], a2, -one, shifted)
        system.unknown_times_known(tag, a1, up[a2], one, shifted)
        # (i1, i2) = (2, 1): [p] L = [p+1] R
        tag = f"exchange21.{a1}{a2}"
        shifted = [q_int(ctx, p + 1) for p in ps]
        for row, (s1, s2) in enumerate(PAIRS):
            c = calA.entry(row, col)
            if c:
                system.unknown_times_known(tag, s1, up[s2], c, qp)
        system.unknown_times_known(tag, a1, up[a2], -one, shifted)
        system.known_times_unknown(tag, up[a1], a2, one, shifted)
    down = system.solve()

    a = {(1, 1): up[1], (1, 2): up[2], (2, 1): down[1], (2, 2): down[2]}
    abar = {(alpha, i): a[(i, alpha)] for i in (1, 2) for alpha in (1, 2)}
    logger.info("h=%d: chiral zero modes built on the %d-dimensional Fock module", h, len(basis))
    return a, abar


# -- relation catalogue ---------------------------------------------------

def sector_relation_checks(ctx: FieldContext, basis: Sequence[FockIndex], op: Op, sector: str) -> List[Check]:
    """Exchange, q-commutation, shift, determinant, ideal and vacuum relations for op(i, alpha)."""
    h = ctx.h
    dim = len(basis)
    ps = [b.p for b in basis]
    label = lambda j: str(basis[j])
    diag = lambda f: ExactMatrix.diagonal(ctx, [f(p) for p in ps])
    calA = antisymmetrizer(ctx)
    q = ctx.q
    checks = []

    for i1 in (1, 2):
        for i2 in (1, 2):
            for a1, a2 in PAIRS:
                col = PAIRS.index((a1, a2))
                L = ExactMatrix.zeros(ctx, dim)
                for row, (s1, s2) in enumerate(PAIRS):
                    c = calA.entry(row, col)
                    if c:
                        L = L + (op(i1, s1) @ op(i2, s2)).scale(c)
                R = op(i1, a1) @ op(i2, a2) - op(i2, a1) @ op(i1, a2)
                if i1 == i2:
                    defect = L - R
                else:
                    defect = diag(lambda p: q_int(ctx, p)) @ L - diag(lambda p: q_int(ctx, p + i1 - i2)) @ R
                checks.append(identity_check(f"{sector}.exchange.{i1}{i2}.{a1}{a2}", defect, label))

    for i in (1, 2):
        checks.append(identity_check(f"{sector}.qcomm.{i}", op(i, 2) @ op(i, 1) - (op(i, 1) @ op(i, 2)).scale(q), label))
    for alpha in (1, 2):
        checks.append(identity_check(f"{sector}.commute.{alpha}",
                                     op(1, alpha) @ op(2, alpha) - op(2, alpha) @ op(1, alpha), label))

    Qp = diag(ctx.q_power)
    for i, factor in ((1, q), (2, ctx.q_power(-1))):
        for alpha in (1, 2):
            a = op(i, alpha)
            checks.append(identity_check(f"{sector}.shift.{i}{alpha}", Qp @ a - (a @ Qp).scale(factor), label))

    E = eps_tensor(ctx)
    bracket_p = diag(lambda p: q_int(ctx, p))
    for alpha, beta in PAIRS:
        defect = op(2, alpha) @ op(1, beta) - op(1, alpha) @ op(2, beta)
        if (alpha, beta) in E:
            defect = defect - bracket_p.scale(E[(alpha, beta)])
        checks.append(identity_check(f"{sector}.determinant.{alpha}{beta}", defect, label))

    for i in (1, 2):
        for alpha in (1, 2):
            checks.append(identity_check(f"{sector}.nilpotent.{i}{alpha}", op(i, alpha).power(h), label))
    checks.append(identity_check(f"{sector}.ideal.hp", diag(lambda p: q_int(ctx, h * p)), label))

    vacuum = basis.index(FockIndex(1, 0))
    for alpha in (1, 2):
        image = op(2, alpha).apply({vacuum: ctx.one})
        checks.append(Check.of(f"{sector}.vacuum.{alpha}", not image, {"basis": str(FockIndex(1, 0))}))
    return checks


# -- quantum group actions ------------------------------------------------

@dataclass
class Quea:
    """Single-copy generators on F and F-bar plus their coproduct images on H."""
    E: ExactMatrix
    F: ExactMatrix
    K: ExactMatrix
    K_inv: ExactMatrix
    Ebar: ExactMatrix
    Fbar: ExactMatrix
    Kbar: ExactMatrix
    Kbar_inv: ExactMatrix
    dE: Optional[ExactMatrix] = None
    dF: Optional[ExactMatrix] = None
    dK_half: Optional[ExactMatrix] = None
    dK_half_inv: Optional[ExactMatrix] = None
    qpd: Optional[ExactMatrix] = None
    qpd_inv: Optional[ExactMatrix] = None

    @property
    def dK(self) -> ExactMatrix:
        return self.dK_half @ self.dK_half

    @property
    def dK_inv(self) -> ExactMatrix:
        return self.dK_half_inv @ self.dK_half_inv


# step(beta, u, Xu) must return X applied to raise[beta] u
Step = Callable[[int, Vector, Vector], Vector]


def recursive_action(ctx: FieldContext, basis: Sequence[FockIndex], vacuum_image: Vector, step: Step) -> ExactMatrix:
    """An operator X on the Fock module defined by X|vac> and its exchange with the raising operators.

    |m,n> is reached from a^1_1|m-1,n> when m > 0, otherwise from a^1_2|0,n-1>;
    when both are available the second route |m,n> = q^-m a^1_2|m,n-1> must agree.
    """
    index = _index(basis)
    columns: List[Vector] = [None] * len(basis)
    for j, b in enumerate(basis):
        if b.p == 1:
            columns[j] = dict(vacuum_image)
            continue
        if b.m > 0:
            parent = index[(b.m - 1, b.n)]
            value = step(1, {parent: ctx.one}, columns[parent])
        else:
            parent = index[(0, b.n - 1)]
            value = step(2, {parent: ctx.one}, columns[parent])
        if b.m > 0 and b.n > 0:
            other = index[(b.m, b.n - 1)]
            alt = vec_scale(step(2, {other: ctx.one}, columns[other]), ctx.q_power(-b.m))
            if vec_sub(value, alt):
                raise ModelConstructionError(f"inconsistent recursive action at {b}")
        columns[j] = value
    return ExactMatrix.from_columns(ctx, len(basis), columns)


def build_quea(model: "ZeroModeModel") -> Quea:
    ctx = model.ctx
    basis = model.basis
    R = {1: model.a[(1, 1)], 2: model.a[(1, 2)]}
    Rbar = {1: model.abar[(1, 1)], 2: model.abar[(2, 1)]}
    vac = {basis.index(FockIndex(1, 0)): ctx.one}
    q, qi = ctx.q, ctx.q_power(-1)

    K = recursive_action(ctx, basis, vac, lambda b, u, Ku: vec_scale(R[b].apply(Ku), q if b == 1 else qi))
    E = recursive_action(ctx, basis, {}, lambda b, u, Eu: (
        R[1].apply(Eu) if b == 1 else vec_axpy(R[2].apply(Eu), ctx.one, R[1].apply(K.apply(u)))))
    F = recursive_action(ctx, basis, {}, lambda b, u, Fu: (
        vec_axpy(vec_scale(R[1].apply(Fu), qi), ctx.one, R[2].apply(u)) if b == 1
        else vec_scale(R[2].apply(Fu), q)))

    Kbar = recursive_action(ctx, basis, vac, lambda b, u, Ku: vec_scale(Rbar[b].apply(Ku), qi if b == 1 else q))
    Kbar_inv = ExactMatrix.diagonal(ctx, [Kbar.entry(j, j).inverse() for j in range(len(basis))])
    Ebar = recursive_action(ctx, basis, {}, lambda b, u, Eu: (
        vec_scale(vec_sub(Rbar[1].apply(Eu), Rbar[2].apply(u)), qi) if b == 1
        else vec_scale(Rbar[2].apply(Eu), q)))
    Fbar = recursive_action(ctx, basis, {}, lambda b, u, Fu: (
        Rbar[1].apply(Fu) if b == 1
        else vec_sub(Rbar[2].apply(Fu), Kbar_inv.apply(Rbar[1].apply(u)))))

    K_inv = ExactMatrix.diagonal(ctx, [K.entry(j, j).inverse() for j in range(len(basis))])
    quea = Quea(E, F, K, K_inv, Ebar, Fbar, Kbar, Kbar_inv)

    dim = len(basis)
    I = ExactMatrix.identity(ctx, dim)
    quea.dE = E.kron(I) + K.kron(Ebar)
    quea.dF = F.kron(Kbar_inv) + I.kron(Fbar)
    weights = [b.m - b.n for b in basis]
    bar_weights = [b.n - b.m for b in basis]
    total = [w + wb for w in weights for wb in bar_weights]
    quea.dK_half = ExactMatrix.diagonal(ctx, [ctx.zeta_power(t) for t in total])
    quea.dK_half_inv = ExactMatrix.diagonal(ctx, [ctx.zeta_power(-t) for t in total])
    diff = [b.p - bb.p for b in basis for bb in basis]
    quea.qpd = ExactMatrix.diagonal(ctx, [ctx.q_power(d) for d in diff])
    quea.qpd_inv = ExactMatrix.diagonal(ctx, [ctx.q_power(-d) for d in diff])
    logger.info("h=%d: quantum group action and coproduct assembled", ctx.h)
    return quea


def quea_checks(model: "ZeroModeModel") -> List[Check]:
    """U_q(sl2) relations on each copy, exchange with the zero modes, coproduct and invariance."""
    ctx, h, qa = model.ctx, model.h, model.quea
    q, qi = ctx.q, ctx.q_power(-1)
    q2, q2i = ctx.q_power(2), ctx.q_power(-2)
    dim = model.dim_F
    I = ExactMatrix.identity(ctx, dim)
    flabel = model.fock_label
    checks = []

    def sl2(prefix, E, F, K, K_inv):
        out = [
            identity_check(f"{prefix}.KE", K @ E - (E @ K).scale(q2), flabel),
            identity_check(f"{prefix}.KF", K @ F - (F @ K).scale(q2i), flabel),
            identity_check(f"{prefix}.EF", (E @ F - F @ E).scale(q - qi) - (K - K_inv), flabel),
            identity_check(f"{prefix}.E^h", E.power(h), flabel),
            identity_check(f"{prefix}.F^h", F.power(h), flabel),
            identity_check(f"{prefix}.K^2h", K.power(2 * h) - I, flabel),
            identity_check(f"{prefix}.KKinv", K @ K_inv - I, flabel),
        ]
        vac = {model.vacuum_index: ctx.one}
        out.append(Check.of(f"{prefix}.vacuum", not E.apply(vac) and not F.apply(vac) and K.apply(vac) == vac,
                            {"basis": str(FockIndex(1, 0))}))
        return out

    checks += sl2("quea.chiral", qa.E, qa.F, qa.K, qa.K_inv)
    checks += sl2("quea.bar", qa.Ebar, qa.Fbar, qa.Kbar, qa.Kbar_inv)

    for i in (1, 2):
        for alpha in (1, 2):
            a = model.a[(i, alpha)]
            up = q if alpha == 1 else qi
            checks.append(identity_check(f"quea.chiral.Ka.{i}{alpha}", qa.K @ a - (a @ qa.K).scale(up), flabel))
            rhs = model.a[(i, 1)] @ qa.K if alpha == 2 else ExactMatrix.zeros(ctx, dim)
            checks.append(identity_check(f"quea.chiral.Ea.{i}{alpha}", qa.E @ a - a @ qa.E - rhs, flabel))
            rhs = model.a[(i, 2)] if alpha == 1 else ExactMatrix.zeros(ctx, dim)
            checks.append(identity_check(f"quea.chiral.Fa.{i}{alpha}",
                                         qa.F @ a - (a @ qa.F).scale(ctx.q_power(2 * alpha - 3)) - rhs, flabel))
            ab = model.abar[(alpha, i)]
            down = qi if alpha == 1 else q
            checks.append(identity_check(f"quea.bar.Ka.{alpha}{i}", qa.Kbar @ ab - (ab @ qa.Kbar).scale(down), flabel))
            rhs = -model.abar[(2, i)] if alpha == 1 else ExactMatrix.zeros(ctx, dim)
            checks.append(identity_check(f"quea.bar.Ea.{alpha}{i}",
                                         (qa.Ebar @ ab).scale(ctx.q_power(3 - 2 * alpha)) - ab @ qa.Ebar - rhs, flabel))
            rhs = qa.Kbar_inv @ model.abar[(1, i)] if alpha == 2 else ExactMatrix.zeros(ctx, dim)
            checks.append(identity_check(f"quea.bar.Fa.{alpha}{i}", ab @ qa.Fbar - qa.Fbar @ ab - rhs, flabel))

    hlabel = model.h_label
    dK, dK_inv = qa.dK, qa.dK_inv
    IH = ExactMatrix.identity(ctx, model.dim_H)
    checks += [
        identity_check("coproduct.KE", qa.dK_half @ qa.dE @ qa.dK_half_inv - qa.dE.scale(q), hlabel),
        identity_check("coproduct.KF", qa.dK_half @ qa.dF @ qa.dK_half_inv - qa.dF.scale(qi), hlabel),
        identity_check("coproduct.EF", (qa.dE @ qa.dF - qa.dF @ qa.dE).scale(q - qi) - (dK - dK_inv), hlabel),
        identity_check("coproduct.Khalf", qa.dK_half @ qa.dK_half_inv - IH, hlabel),
        identity_check("coproduct.qpd", qa.qpd @ qa.qpd_inv - IH, hlabel),
    ]
    generators = {"E": qa.dE, "F": qa.dF, "Khalf": qa.dK_half}
    for i in (1, 2):
        for j in (1, 2):
            bilinear = model.a[(i, 1)].kron(model.abar[(1, j)]) + model.a[(i, 2)].kron(model.abar[(2, j)])
            for name, X in generators.items():
                checks.append(identity_check(f"invariance.{name}.{i}{j}", X @ bilinear - bilinear @ X, hlabel))
    return checks


# -- bilinears ------------------------------------------------------------

BILINEARS = ("A", "A'", "B", "B'", "A1", "A2", "A'1", "A'2")


def build_bilinears(model: "ZeroModeModel") -> Dict[str, ExactMatrix]:
    a, ab = model.a, model.abar
    t = lambda i, alpha, j: a[(i, alpha)].kron(ab[(alpha, j)])
    out = {
        "A1": t(2, 1, 2), "A2": t(2, 2, 2),
        "A'1": t(1, 1, 1), "A'2": t(1, 2, 1),
        "B": t(1, 1, 2) + t(1, 2, 2),
        "B'": -(t(2, 1, 1) + t(2, 2, 1)),
    }
    out["A"] = out["A1"] + out["A2"]
    out["A'"] = out["A'1"] + out["A'2"]
    return out


def bilinear_checks(model: "ZeroModeModel", prefix: str = "bilinear") -> List[Check]:
    ctx, h, bl = model.ctx, model.h, model.bilinears
    label = model.h_label
    ps = model.h_weights()
    diag = lambda f: ExactMatrix.diagonal(ctx, [f(p, pb) for p, pb in ps])
    comm = lambda X, Y: X @ Y - Y @ X
    A, Ap, B, Bp = bl["A"], bl["A'"], bl["B"], bl["B'"]
    Qs = diag(lambda p, pb: ctx.q_power(p + pb))
    Qd = diag(lambda p, pb: ctx.q_power(p - pb))
    q2 = ctx.q_power(2)
    checks = [
        identity_check(f"{prefix}.[A,A']", comm(A, Ap) - diag(lambda p, pb: q_int(ctx, p + pb)), label),
        identity_check(f"{prefix}.[B,B']", comm(B, Bp) - diag(lambda p, pb: q_int(ctx, p - pb)), label),
        identity_check(f"{prefix}.shift.A", Qs @ A - (A @ Qs).scale(ctx.q_power(-2)), label),
        identity_check(f"{prefix}.shift.A'", Qs @ Ap - (Ap @ Qs).scale(q2), label),
        identity_check(f"{prefix}.shift.B", Qd @ B - (B @ Qd).scale(q2), label),
        identity_check(f"{prefix}.shift.B'", Qd @ Bp - (Bp @ Qd).scale(ctx.q_power(-2)), label),
        identity_check(f"{prefix}.A2A1", bl["A2"] @ bl["A1"] - (bl["A1"] @ bl["A2"]).scale(q2), label),
        identity_check(f"{prefix}.A'2A'1", bl["A'2"] @ bl["A'1"] - (bl["A'1"] @ bl["A'2"]).scale(q2), label),
        identity_check(f"{prefix}.A=A1+A2", A - bl["A1"] - bl["A2"], label),
        identity_check(f"{prefix}.A'=A'1+A'2", Ap - bl["A'1"] - bl["A'2"], label),
    ]
    for name in BILINEARS:
        if name.startswith("A"):
            checks.append(identity_check(f"{prefix}.nilpotent.{name}", bl[name].power(h), label))
    for x in ("A", "A'"):
        for y in ("B", "B'"):
            checks.append(identity_check(f"{prefix}.[{x},{y}]", comm(bl[x], bl[y]), label))
    vac = {model.h_vacuum_index: ctx.one}
    checks.append(Check.of(f"{prefix}.A.vacuum", not A.apply(vac), {"basis": model.h_label(model.h_vacuum_index)}))
    return checks


# -- the model ------------------------------------------------------------

@dataclass
class ZeroModeModel:
    h: int
    ctx: FieldContext
    basis: List[FockIndex]
    a: Dict[Tuple[int, int], ExactMatrix]
    abar: Dict[Tuple[int, int], ExactMatrix]
    quea: Optional[Quea] = None
    bilinears: Dict[str, ExactMatrix] = field(default_factory=dict)
    H_I: Optional[Subspace] = None
    inv_basis: Optional[List[Vector]] = None

    @property
    def bar_basis(self) -> List[FockIndex]:
        return self.basis

    @property
    def dim_F(self) -> int:
        return len(self.basis)

    @property
    def dim_H(self) -> int:
        return self.dim_F ** 2

    @property
    def vacuum_index(self) -> int:
        return 0

    @property
    def h_vacuum_index(self) -> int:
        return 0

    def fock_label(self, j: int) -> str:
        return str(self.basis[j])

    def h_label(self, j: int) -> str:
        i, ib = divmod(j, self.dim_F)
        return f"{self.basis[i]}{self.basis[ib]}"

    def h_weights(self) -> List[Tuple[int, int]]:
        """(p, pbar) per basis vector of H."""
        return [(b.p, bb.p) for b in self.basis for bb in self.basis]

    @property
    def A(self) -> ExactMatrix:
        return self.bilinears["A"]


def invariant_subspace(model: ZeroModeModel) -> Subspace:
    """Joint kernel of Delta(E), Delta(F), Delta(K)-1, B, B', q^(p-pbar)-1."""
    qa = model.quea
    I = ExactMatrix.identity(model.ctx, model.dim_H)
    stacked = qa.dE.vstack(qa.dF, qa.dK - I, model.bilinears["B"], model.bilinears["B'"], qa.qpd - I)
    H_I = kernel_basis(stacked)
    if H_I.dim != 2 * model.h - 1:
        raise ExpectationError(f"h={model.h}: invariant subspace has dimension {H_I.dim}, expected {2 * model.h - 1}")
    logger.info("h=%d: invariant subspace of dimension %d", model.h, H_I.dim)
    return H_I


def invariant_basis(model: ZeroModeModel) -> List[Vector]:
    """|n+1>_I = sum over l of q^(l(n-l)) (A'_1)^[l] (A'_2)^[n-l] |vac>, n = 0..2h-2."""
    ctx, h = model.ctx, model.h
    A1p, A2p = model.bilinears["A'1"], model.bilinears["A'2"]
    vac = {model.h_vacuum_index: ctx.one}
    powers2 = [vac]
    for _ in range(h - 1):
        powers2.append(A2p.apply(powers2[-1]))
    vectors = []
    for n in range(2 * h - 1):
        low = max(0, n - h + 1)
        total: Vector = {}
        for l in range(low, n - low + 1):
            coeff = ctx.q_power(l * (n - l)) * q_divided_power_coeff(ctx, l) * q_divided_power_coeff(ctx, n - l)
            v = powers2[n - l]
            for _ in range(l):
                v = A1p.apply(v)
            vec_axpy(total, coeff, v)
        vectors.append(total)
    return vectors


def invariant_basis_checks(model: ZeroModeModel, prefix: str = "theorem0.a") -> List[Check]:
    ctx, h = model.ctx, model.h
    vectors = model.inv_basis
    A = model.A
    checks = [Check.of(f"{prefix}.vacuum", vectors[0] == {model.h_vacuum_index: ctx.one})]
    span = Subspace.from_vectors(ctx, model.dim_H, vectors)
    checks.append(Check.of(f"{prefix}.independent", span.dim == 2 * h - 1, {"rank": span.dim}))
    checks.append(Check.of(f"{prefix}.spans", span == model.H_I, {"rank": span.dim}))
    weights = model.h_weights()
    qa = model.quea
    for n, v in enumerate(vectors, start=1):
        checks.append(Check.of(f"{prefix}.member.{n}", model.H_I.contains(v)))
        previous = vectors[n - 2] if n > 1 else {}
        lowered = vec_sub(A.apply(v), vec_scale(previous, q_int(ctx, n)))
        checks.append(Check.of(f"{prefix}.lowering.{n}", not lowered, _vector_witness(model, lowered)))
        weighted = {j: (q_int(ctx, weights[j][0]) - q_int(ctx, n)) * c for j, c in v.items()}
        weighted = {j: c for j, c in weighted.items() if c}
        checks.append(Check.of(f"{prefix}.weight.{n}", not weighted, _vector_witness(model, weighted)))
        moved = {}
        for X in (qa.dE, qa.dF, model.bilinears["B"], model.bilinears["B'"]):
            moved.update(X.apply(v))
        for X in (qa.dK_half, qa.qpd):
            moved.update(vec_sub(X.apply(v), v))
        checks.append(Check.of(f"{prefix}.counit.{n}", not moved, _vector_witness(model, moved)))
    return checks


def _vector_witness(model: ZeroModeModel, v: Vector):
    if not v:
        return None
    j = min(v)
    return {"basis": model.h_label(j), "index": j}


def restricted_A(model: ZeroModeModel) -> HDiffSpace:
    """(H_I, A|H_I) in the echelon basis of H_I."""
    return restrict_to_subspace(HDiffSpace(model.h, model.dim_H, model.A), model.H_I)


def verify_matrix_relations(model: ZeroModeModel) -> SuiteReport:
    report = SuiteReport("relations", model.h)
    report.extend(tensor_checks(model.ctx))
    report.extend(sector_relation_checks(model.ctx, model.basis, lambda i, alpha: model.a[(i, alpha)], "chiral"))
    report.extend(sector_relation_checks(model.ctx, model.bar_basis, lambda i, alpha: model.abar[(alpha, i)], "bar"))
    report.extend(quea_checks(model))
    report.extend(bilinear_checks(model))
    return report


def verify_theorem0(model: ZeroModeModel) -> SuiteReport:
    ctx, h = model.ctx, model.h
    report = SuiteReport("theorem0", h)
    report.add(Check.of("dims.F", model.dim_F == h * h, {"dim": model.dim_F}))
    report.add(Check.of("dims.H", model.dim_H == h ** 4, {"dim": model.dim_H}))
    report.add(Check.of("dims.H_I", model.H_I.dim == 2 * h - 1, {"dim": model.H_I.dim}))
    report.extend(invariant_basis_checks(model))
    report.extend(c for c in bilinear_checks(model, "theorem0.b")
                  if ".A2A1" in c.id or ".A'2A'1" in c.id or ".nilpotent." in c.id)

    A = model.A
    invariant = all(model.H_I.contains(A.apply(w)) for w in model.H_I.basis)
    report.add(Check.of("theorem0.c.restriction", invariant))
    if not invariant:
        return report
    space = restricted_A(model)
    dims = [gen_homology(space, k, representatives=False)[0] for k in range(1, h)]
    profile = nilpotent_profile(space.d, h)
    for k, dim in enumerate(dims, start=1):
        report.add(Check.of(f"theorem0.c.dims.{k}", dim == 1, {"dim": dim}))
    expected = [0] * h
    expected[h - 2] += 1
    expected[h - 1] += 1
    report.add(Check.of("theorem0.c.jordan", list(profile.multiplicities) == expected,
                        {"multiplicities": list(profile.multiplicities)}))

    for n in range(1, h):
        v = model.inv_basis[n - 1]
        killed = not A.power(n).apply(v)
        image = Subspace.from_vectors(ctx, model.dim_H, [A.power(h - n).apply(w) for w in model.H_I.basis])
        report.add(Check.of(f"theorem0.c.generator.{n}", killed and not image.contains(v),
                            {"in_kernel": killed}))
    report.data = {"dims": dims, "multiplicities": list(profile.multiplicities),
                   "dim_F": model.dim_F, "dim_H": model.dim_H, "dim_H_I": model.H_I.dim}
    return report


def profile_on_H(model: ZeroModeModel) -> dict:
    """Jordan type of A on the whole of H and the homology it would give."""
    profile = nilpotent_profile(model.A, model.h)
    space = HDiffSpace(model.h, model.dim_H, model.A)
    direct = [gen_homology(space, k, representatives=False)[0] for k in range(1, model.h)]
    return {"ranks": list(profile.ranks), "multiplicities": list(profile.multiplicities),
            "predicted": homology_dims_from_multiplicities(profile.multiplicities, model.h),
            "dims": direct}


def build_model(h: int) -> ZeroModeModel:
    """Every stage of the zero-mode model for height h."""
    ctx = field_new(h)
    basis = fock_basis(h)
    a, abar = build_chiral_ops(h)
    model = ZeroModeModel(h, ctx, basis, a, abar)
    model.quea = build_quea(model)
    model.bilinears = build_bilinears(model)
    model.H_I = invariant_subspace(model)
    model.inv_basis = invariant_basis(model)
    return model

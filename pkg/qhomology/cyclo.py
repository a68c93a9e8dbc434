"""Exact arithmetic in the cyclotomic field Q(zeta), zeta a primitive 4h-th root of unity.

q = zeta**2 is a primitive 2h-th root of unity (q**h = -1) and q**(1/2) = zeta is
representable, so every entry of the zero-mode operators lives in this field.
The field is sympy's algebraic field QQ<zeta> with modulus Phi_{4h}; a Scalar
wraps one of its elements and carries the height it belongs to.
"""
import cmath
import logging
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

from sympy import QQ, I, Poly, Rational, cyclotomic_poly, exp, pi, symbols

from .errors import InvalidHeightError, QFactorialError, SingularScalarError

logger = logging.getLogger(__name__)

_x = symbols('x')

Number = Union[int, "QQ.dtype", "Scalar"]


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> Tuple[int, ...]:
    """Ascending integer coefficients of Phi_n."""
    poly = cyclotomic_poly(n, _x, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def to_rational(value) -> "QQ.dtype":
    """A rational ground element from an int, a QQ element or a string such as "-3/2"."""
    if isinstance(value, str):
        return QQ.from_sympy(Rational(value))
    return QQ.convert(value)


class FieldContext:
    """The field Q(zeta_{4h}) for a fixed height h."""

    def __init__(self, h: int):
        if isinstance(h, bool) or not isinstance(h, int) or h < 2:
            raise InvalidHeightError(h)
        self.h = h
        self.order = 4 * h
        self.min_poly = cyclotomic_coeffs(self.order)
        self.degree = len(self.min_poly) - 1
        modulus = Poly(list(reversed(self.min_poly)), _x, domain=QQ)
        self.K = QQ.algebraic_field((modulus, exp(2 * pi * I / self.order)), alias="zeta")
        self._q_ints: Dict[int, Scalar] = {}
        self.zero = Scalar(self, self.K.zero)
        self.one = Scalar(self, self.K.one)
        self._zeta_powers: List[Scalar] = []
        power = self.K.one
        for _ in range(self.order):
            self._zeta_powers.append(Scalar(self, power))
            power = power * self.K.unit
        logger.debug("field %s: degree %d, Phi = %s", self.K, self.degree, self.min_poly)

    @property
    def zeta(self) -> "Scalar":
        return self._zeta_powers[1]

    @property
    def q(self) -> "Scalar":
        return self._zeta_powers[2]

    def zeta_power(self, k: int) -> "Scalar":
        return self._zeta_powers[k % self.order]

    def q_power(self, k: int) -> "Scalar":
        return self._zeta_powers[(2 * k) % self.order]

    def element(self, value: Number):
        """The field element (a sympy ANP) for a Scalar, an int or a rational."""
        if isinstance(value, Scalar):
            return value.rep
        return self.K.new([to_rational(value)])

    def scalar(self, value: Number) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return Scalar(self, self.element(value))

    def from_coords(self, coords: Sequence) -> "Scalar":
        """Scalar with the given ascending coordinates in the power basis 1, zeta, zeta**2, ..."""
        if len(coords) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(coords)}")
        return Scalar(self, self.K.new([to_rational(c) for c in reversed(coords)]))

    def __repr__(self) -> str:
        return f"FieldContext(h={self.h})"


@lru_cache(maxsize=None)
def field_new(h: int) -> FieldContext:
    """Return the shared field context for height h."""
    return FieldContext(h)


class Scalar:
    """An immutable element of Q(zeta_{4h})."""

    __slots__ = ("ctx", "rep")

    def __init__(self, ctx: FieldContext, rep):
        self.ctx = ctx
        self.rep = rep

    @property
    def coords(self) -> Tuple:
        """Ascending QQ coordinates in the power basis, padded to the field degree."""
        desc = self.rep.to_list()
        return tuple(reversed(desc)) + (QQ.zero,) * (self.ctx.degree - len(desc))

    def is_zero(self) -> bool:
        return not self.rep

    def __bool__(self) -> bool:
        return bool(self.rep)

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.ctx.h != self.ctx.h:
                raise ValueError(f"scalars from different fields (h={self.ctx.h}, h={other.ctx.h})")
            return other.rep
        if isinstance(other, int) or QQ.of_type(other):
            return self.ctx.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.ctx, self.rep + other)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ctx, -self.rep)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.ctx, self.rep - other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.ctx, self.rep * other)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.rep:
            raise SingularScalarError("division by the zero scalar")
        return Scalar(self.ctx, self.rep ** -1)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * Scalar(self.ctx, other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar(self.ctx, self.rep ** n)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ctx.h == other.ctx.h and self.rep == other.rep
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.rep == other

    def __hash__(self):
        return hash((self.ctx.h, self.rep.to_tuple()))

    def to_json(self) -> List[List[str]]:
        return [[str(int(QQ.numer(c))), str(int(QQ.denom(c)))] for c in self.coords]

    @classmethod
    def from_json(cls, ctx: FieldContext, data) -> "Scalar":
        if isinstance(data, (int, str)):
            return ctx.scalar(to_rational(data))
        return ctx.from_coords([QQ(int(n), int(d)) for n, d in data])

    def approx(self) -> complex:
        """Floating-point value under zeta = exp(2*pi*i/4h). Display only, never used for decisions."""
        z = cmath.exp(2j * cmath.pi / self.ctx.order)
        return sum(int(QQ.numer(c)) / int(QQ.denom(c)) * z ** k for k, c in enumerate(self.coords))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coords):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*z^{k}")
        return " + ".join(terms) if terms else "0"


def scalar_arith(ctx: FieldContext, lhs: Number, op: str, rhs: Number) -> Scalar:
    """Apply one of add, sub, mul, div to two scalars of ``ctx``."""
    lhs, rhs = ctx.scalar(lhs), ctx.scalar(rhs)
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown scalar operation {op!r}")


def q_int(ctx: FieldContext, n: int) -> Scalar:
    """The q-integer [n] = (q^n - q^-n)/(q - q^-1)."""
    cached = ctx._q_ints.get(n)
    if cached is not None:
        return cached
    if n < 0:
        value = -q_int(ctx, -n)
    else:
        value = ctx.zero
        for j in range(n):
            value = value + ctx.q_power(n - 1 - 2 * j)
    ctx._q_ints[n] = value
    return value


def q_factorial(ctx: FieldContext, n: int) -> Scalar:
    if n < 0:
        raise ValueError(f"q-factorial of negative integer {n}")
    value = ctx.one
    for k in range(1, n + 1):
        value = value * q_int(ctx, k)
    return value


def q_divided_power_coeff(ctx: FieldContext, n: int) -> Scalar:
    """1/[n]! for 0 <= n <= h-1."""
    if n < 0:
        raise ValueError(f"divided power of negative order {n}")
    if n >= ctx.h:
        raise QFactorialError(f"[{n}]! vanishes for h={ctx.h}; divided powers exist only up to {ctx.h - 1}")
    return q_factorial(ctx, n).inverse()


def q2_sum(ctx: FieldContext, n: int) -> Scalar:
    """Partial geometric sum 1 + q^2 + ... + q^(2(n-1))."""
    value = ctx.zero
    for j in range(n):
        value = value + ctx.q_power(2 * j)
    return value


def q2_factorial(ctx: FieldContext, n: int) -> Scalar:
    """(1)(1 + q^2)...(1 + q^2 + ... + q^(2(n-1)))."""
    value = ctx.one
    for j in range(1, n + 1):
        value = value * q2_sum(ctx, j)
    return value


def q2_binomial(ctx: FieldContext, n: int, k: int) -> Scalar:
    """Gaussian binomial in q^2, via [n,k] = [n-1,k-1] + q^(2k)[n-1,k]."""
    if k < 0 or k > n:
        return ctx.zero
    row = [ctx.one]
    for m in range(1, n + 1):
        nxt = []
        for j in range(m + 1):
            left = row[j - 1] if j >= 1 else ctx.zero
            right = row[j] if j < m else ctx.zero
            nxt.append(left + ctx.q_power(2 * j) * right)
        row = nxt
    return row[k]

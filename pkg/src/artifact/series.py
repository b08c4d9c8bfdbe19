"""Truncated formal Laurent series with half-integer exponents and an expansion direction,
q-Pochhammer products, the exchange scalars and delta-function substitution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .cartan import AlgebraKind
from .scalar import FieldElement
from .vecrep import LaurentPoly, xi_exponent

UP = "z"        # ascending in z: exact for exponents <= hi, support >= lo
DOWN = "z^-1"   # ascending in 1/z: exact for exponents >= lo, support <= hi
DEFAULT_ORDER = 12

_ZERO = FieldElement(0)
_ONE = FieldElement(1)


class DirectionError(ValueError):
    pass


def _half(x) -> Fraction:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise ValueError(f"exponent {x} is not a half-integer")
    return x


@dataclass(frozen=True)
class FormalSeries:
    """sum c_e z^e over e in (1/2)Z, exact on the window [lo, hi] in the given direction."""

    coeffs: Mapping[Fraction, FieldElement]
    lo: Fraction
    hi: Fraction
    direction: str = UP

    def __post_init__(self):
        if self.direction not in (UP, DOWN):
            raise DirectionError(f"unknown direction {self.direction!r}")
        lo, hi = _half(self.lo), _half(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        clean = {}
        for e, c in self.coeffs.items():
            e = _half(e)
            c = FieldElement.coerce(c)
            if c.is_zero():
                continue
            if not lo <= e <= hi:
                continue
            clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    # construction
    @classmethod
    def from_terms(cls, terms: Mapping, order: int, direction: str = UP, shift=0) -> "FormalSeries":
        """Series starting at exponent ``shift`` with ``order`` further exact steps."""
        shift = Fraction(shift)
        lo, hi = (shift, shift + order) if direction == UP else (shift - order, shift)
        return cls(dict(terms), lo, hi, direction)

    @classmethod
    def one(cls, order: int, direction: str = UP) -> "FormalSeries":
        return cls.from_terms({0: _ONE}, order, direction)

    # access
    def __getitem__(self, e) -> FieldElement:
        e = _half(e)
        if not self.lo <= e <= self.hi:
            raise KeyError(f"exponent {e} outside window [{self.lo}, {self.hi}]")
        return self.coeffs.get(e, _ZERO)

    @property
    def start(self) -> Fraction:
        """Exponent where the expansion starts (the fixed end of the window)."""
        return self.lo if self.direction == UP else self.hi

    @property
    def order(self) -> Fraction:
        return self.hi - self.lo

    def steps(self) -> list[Fraction]:
        """Exact exponents from the start outwards, in unit steps."""
        sgn = 1 if self.direction == UP else -1
        return [self.start + sgn * k for k in range(int(self.order) + 1)]

    # arithmetic
    def _same(self, other: "FormalSeries"):
        if self.direction != other.direction:
            raise DirectionError("series with opposite expansion directions cannot be combined")

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._same(other)
        if self.direction == UP:
            lo, hi = min(self.lo, other.lo), min(self.hi, other.hi)
        else:
            lo, hi = max(self.lo, other.lo), max(self.hi, other.hi)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return FormalSeries(out, lo, hi, self.direction)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries({e: -c for e, c in self.coeffs.items()}, self.lo, self.hi, self.direction)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormalSeries":
        c = FieldElement.coerce(c)
        return FormalSeries({e: x * c for e, x in self.coeffs.items()}, self.lo, self.hi, self.direction)

    def shift(self, k) -> "FormalSeries":
        """Multiply by z^k."""
        k = _half(k)
        return FormalSeries({e + k: c for e, c in self.coeffs.items()},
                            self.lo + k, self.hi + k, self.direction)

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        self._same(other)
        if self.direction == UP:
            lo = self.lo + other.lo
            hi = min(self.lo + other.hi, self.hi + other.lo)
        else:
            hi = self.hi + other.hi
            lo = max(self.lo + other.hi, self.hi + other.lo)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if lo <= e <= hi:
                    t = c1 * c2
                    out[e] = out[e] + t if e in out else t
        return FormalSeries(out, lo, hi, self.direction)

    __rmul__ = __mul__

    def inverse(self) -> "FormalSeries":
        """Reciprocal; the coefficient at the start of the window must be invertible."""
        s = self.steps()
        a0 = self.coeffs.get(s[0], _ZERO)
        if a0.is_zero():
            raise ZeroDivisionError("leading coefficient vanishes")
        inv0 = a0.inverse()
        b = [inv0]
        a = [self.coeffs.get(e, _ZERO) for e in s]
        for n in range(1, len(s)):
            acc = _ZERO
            for k in range(1, n + 1):
                if not a[k].is_zero():
                    acc = acc + a[k] * b[n - k]
            b.append(-acc * inv0)
        sgn = 1 if self.direction == UP else -1
        start = -s[0]
        terms = {start + sgn * k: c for k, c in enumerate(b)}
        order = len(s) - 1
        lo, hi = (start, start + order) if self.direction == UP else (start - order, start)
        return FormalSeries(terms, lo, hi, self.direction)

    def __truediv__(self, other: "FormalSeries") -> "FormalSeries":
        return self * other.inverse()

    def invert_variable(self) -> "FormalSeries":
        """z -> 1/z; the direction flips."""
        d = DOWN if self.direction == UP else UP
        return FormalSeries({-e: c for e, c in self.coeffs.items()}, -self.hi, -self.lo, d)

    def truncate(self, order: int) -> "FormalSeries":
        order = min(Fraction(order), self.order)
        if self.direction == UP:
            return FormalSeries(self.coeffs, self.lo, self.lo + order, UP)
        return FormalSeries(self.coeffs, self.hi - order, self.hi, DOWN)

    def substitute_scale(self, s) -> "FormalSeries":
        """z -> s z for an integer-exponent series."""
        s = FieldElement.coerce(s)
        out = {}
        for e, c in self.coeffs.items():
            if e.denominator != 1:
                raise ValueError("scaling needs integer exponents")
            out[e] = c * s ** int(e)
        return FormalSeries(out, self.lo, self.hi, self.direction)

    def agrees(self, other: "FormalSeries") -> list[Fraction]:
        """Exponents in the common exact window where the coefficients differ."""
        self._same(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        exps = sorted({e for e in list(self.coeffs) + list(other.coeffs) if lo <= e <= hi})
        return [e for e in exps if self.coeffs.get(e, _ZERO) != other.coeffs.get(e, _ZERO)]

    def __eq__(self, other):
        return (isinstance(other, FormalSeries) and self.direction == other.direction
                and self.lo == other.lo and self.hi == other.hi and not self.agrees(other))

    def __hash__(self):
        return hash((self.direction, self.lo, self.hi, len(self.coeffs)))

    def specialize(self, v) -> dict[Fraction, Fraction]:
        return {e: c.specialize(v) for e, c in self.coeffs.items()}

    def to_json(self) -> dict:
        return {"direction": self.direction,
                "window": [[int(2 * self.lo), 2], [int(2 * self.hi), 2]],
                "terms": [[[int(2 * e), 2], c.to_json()] for e, c in sorted(self.coeffs.items())]}

    def __repr__(self):
        body = " + ".join(f"({c})z^{e}" for e, c in sorted(self.coeffs.items())) or "0"
        return f"FormalSeries[{self.direction}; {self.lo}..{self.hi}]({body})"


# ---------------------------------------------------------------- factored mixed series

@dataclass(frozen=True)
class MixedSeries:
    """z^power * up(z) * down(1/z): a product of two opposite expansions kept factored."""

    power: Fraction
    up: FormalSeries
    down: FormalSeries

    def __post_init__(self):
        if self.up.direction != UP or self.down.direction != DOWN:
            raise DirectionError("mixed series needs one factor of each direction")

    def __mul__(self, other):
        if isinstance(other, MixedSeries):
            return MixedSeries(self.power + other.power, self.up * other.up, self.down * other.down)
        if isinstance(other, FormalSeries):
            if other.direction == UP:
                return MixedSeries(self.power, self.up * other, self.down)
            return MixedSeries(self.power, self.up, self.down * other)
        return MixedSeries(self.power, self.up.scale(other), self.down)

    def invert_variable(self) -> "MixedSeries":
        return MixedSeries(-self.power, self.down.invert_variable(), self.up.invert_variable())

    def unit_residual(self) -> list[tuple[str, Fraction, FieldElement]]:
        """Nonzero coefficients left over when testing the product against 1."""
        res = []
        if self.power != 0:
            res.append(("power", self.power, _ONE))
        c = self.up.coeffs.get(Fraction(0), _ZERO)
        if c.is_zero():
            return res + [("up", Fraction(0), _ZERO)]
        for e in self.up.steps():
            x = self.up.coeffs.get(e, _ZERO) - (c if e == 0 else _ZERO)
            if not x.is_zero():
                res.append(("up", e, x))
        cinv = c.inverse()
        for e in self.down.steps():
            x = self.down.coeffs.get(e, _ZERO) - (cinv if e == 0 else _ZERO)
            if not x.is_zero():
                res.append(("down", e, x))
        return res

    def to_json(self) -> dict:
        return {"power": [int(2 * self.power), 2], "up": self.up.to_json(), "down": self.down.to_json()}


# ---------------------------------------------------------------- q-Pochhammer

@dataclass(frozen=True)
class PochhammerSpec:
    """(a; xi^2)_inf with a = coeff * z^z_exp * q^q_exp * xi^xi_exp."""

    kind: AlgebraKind
    z_exp: int
    q_exp: int = 0
    xi_exp: int = 0
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        if self.z_exp not in (-1, 0, 1):
            raise ValueError("z exponent must be -1, 0 or 1")
        if xi_exponent(self.kind) <= 0:
            raise ValueError("base must be a positive power of q")

    @property
    def base_q_exp(self) -> int:
        return 2 * xi_exponent(self.kind)

    def argument(self) -> FieldElement:
        """Coefficient of z^z_exp in a, as a field element."""
        return FieldElement.coerce(Fraction(self.coeff)) * FieldElement.q(
            self.q_exp + self.xi_exp * xi_exponent(self.kind))


def _direction(z_exp: int) -> str:
    return DOWN if z_exp < 0 else UP


def _p_factorials(pq: int, order: int) -> list[FieldElement]:
    out = [_ONE]
    for k in range(1, order + 1):
        out.append(out[-1] * (_ONE - FieldElement.q(pq * k)))
    return out


def pochhammer_series(spec: PochhammerSpec, order: int, inverse: bool = False) -> FormalSeries:
    """(a; p)_inf, or its reciprocal, from the Euler sums over n of a^n / (p;p)_n."""
    if order < 0:
        raise ValueError("order must be non-negative")
    d = _direction(spec.z_exp)
    if spec.coeff == 0:
        return FormalSeries.one(order, d)
    if spec.z_exp == 0:
        raise ValueError("constant argument: the infinite product is not a finite series")
    a = spec.argument()
    pq = spec.base_q_exp
    fac = _p_factorials(pq, order)
    terms = {}
    for n in range(order + 1):
        if inverse:
            c = a ** n / fac[n]
        else:
            c = (-a) ** n * FieldElement.q(pq * n * (n - 1) // 2) / fac[n]
        terms[spec.z_exp * n] = c
    return FormalSeries.from_terms(terms, order, d)


def pochhammer_series_log(spec: PochhammerSpec, order: int, inverse: bool = False) -> FormalSeries:
    """Independent expansion: exp of log (a;p)_inf = -sum_m a^m / (m (1 - p^m))."""
    d = _direction(spec.z_exp)
    if spec.coeff == 0:
        return FormalSeries.one(order, d)
    if spec.z_exp == 0:
        raise ValueError("constant argument: the infinite product is not a finite series")
    a = spec.argument()
    pq = spec.base_q_exp
    sgn = 1 if inverse else -1
    # l_m: coefficient of t^m in the log, t = z^z_exp
    lg = [_ZERO] + [a ** m * sgn / (m * (_ONE - FieldElement.q(pq * m))) for m in range(1, order + 1)]
    c = [_ONE]
    for n in range(1, order + 1):
        acc = _ZERO
        for k in range(1, n + 1):
            acc = acc + lg[k] * c[n - k] * k
        c.append(acc / n)
    return FormalSeries.from_terms({spec.z_exp * n: x for n, x in enumerate(c)}, order, d)


# ---------------------------------------------------------------- exchange scalars

# factor lists: (z_exp, q_exp, xi_exp)
RHO_UP_NUM = [(1, -2, 1), (1, 0, 1), (1, -2, 2)]
RHO_UP_DEN = [(1, 0, 0), (1, -2, 2)]
RHO_DOWN_NUM = [(-1, 0, 0)]
RHO_DOWN_DEN = [(-1, 0, 1), (-1, -2, 1)]
F_NUM = [(-1, 0, 1), (-1, -2, 0)]
F_DEN = [(-1, 0, 2), (-1, -2, 1)]

RHO_MUTATIONS = ("drop-z", "flip-q")


def _product(kind, num, den, order, direction, expand=pochhammer_series) -> FormalSeries:
    out = FormalSeries.one(order, direction)
    for z, qe, xe in num:
        out = out * expand(PochhammerSpec(kind, z, qe, xe), order)
    for z, qe, xe in den:
        out = out * expand(PochhammerSpec(kind, z, qe, xe), order, inverse=True)
    return out


def rho_series(kind: AlgebraKind, order: int = DEFAULT_ORDER, mutate: str | None = None,
               expand=pochhammer_series) -> MixedSeries:
    """rho(z) = z * (z-small factors) * (1/z-small factors), each Pochhammer in its own direction."""
    up_num = list(RHO_UP_NUM)
    power = Fraction(1)
    if mutate == "drop-z":
        power = Fraction(0)
    elif mutate == "flip-q":
        up_num[0] = (1, 2, 1)
    elif mutate is not None:
        raise ValueError(f"unknown mutation {mutate!r}")
    up = _product(kind, up_num, RHO_UP_DEN, order, UP, expand)
    down = _product(kind, RHO_DOWN_NUM, RHO_DOWN_DEN, order, DOWN, expand)
    return MixedSeries(power, up, down)


def rho_series_dual(kind: AlgebraKind, order: int = DEFAULT_ORDER) -> MixedSeries:
    return rho_series(kind, order, expand=pochhammer_series_log)


def f_series(kind: AlgebraKind, order: int = DEFAULT_ORDER, expand=pochhammer_series) -> FormalSeries:
    """The four-factor quotient in 1/z with constant term 1."""
    return _product(kind, F_NUM, F_DEN, order, DOWN, expand)


def f_g_series(kind: AlgebraKind, order: int = DEFAULT_ORDER) -> tuple[FormalSeries, MixedSeries]:
    """(F, G = rho * F); G keeps its two opposite expansions factored."""
    F = f_series(kind, order)
    return F, rho_series(kind, order) * F


def clifford_scalars(kind: AlgebraKind, order: int) -> tuple[FormalSeries, FormalSeries]:
    """Exchange scalars used by the mode relations.

    F(x) = (xi/x;p)(q^-2/x;p) / ((1/x;p)(q^-2 xi/x;p)) in powers of 1/x, p = xi^2.
    G(x) = F(1/x) / lambda(x) in powers of x, where lambda(x) = (x - q^2)/(1 - q^2 x) is the
    eigenvalue of P Rbar(x) on the q-antisymmetric part of V (x) V:
    G(x) = -q^-2 (1 - q^2 x)(xi x;p)(q^-2 xi^2 x;p) / ((x;p)(q^-2 xi x;p)).
    """
    F = _product(kind, [(-1, 0, 1), (-1, -2, 0)], [(-1, 0, 0), (-1, -2, 1)], order, DOWN)
    G = _product(kind, [(1, 0, 1), (1, -2, 2)], [(1, 0, 0), (1, -2, 1)], order, UP)
    lin = FormalSeries.from_terms({0: _ONE, 1: -FieldElement.q(2)}, order, UP)
    return F, (G * lin).scale(-FieldElement.q(-2))


# ---------------------------------------------------------------- consistency of the double exchange

@dataclass
class DoubleSwapReport:
    kind: str
    order: int
    scalar_residual: list
    matrix_residual: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.scalar_residual and not self.matrix_residual

    def to_json(self) -> dict:
        return {"kind": self.kind, "order": self.order, "ok": self.ok,
                "scalar_residual": [[p, str(e), c.to_json()] for p, e, c in self.scalar_residual],
                "matrix_residual": self.matrix_residual}


def double_swap_check(kind: AlgebraKind, order: int = 8, mutate: str | None = None,
                      r_mutate: str | None = None) -> DoubleSwapReport:
    """rho(z) rho(1/z) (P R(z) P) R(1/z) = 1 through ``order``.

    The matrix product is reduced exactly to its scalar lambda(z); the remaining scalar
    rho(z) rho(1/z) lambda(z) is checked coefficient-wise on both expansion factors.
    """
    from .rmatrix import NotScalarError, build_rbar, unitarity_scalar

    if order < 1:
        raise ValueError("order must be at least 1")
    rho = rho_series(kind, order, mutate)
    prod = rho * rho.invert_variable()
    mres = []
    try:
        lam = unitarity_scalar(kind, build_rbar(kind, r_mutate))
        diff = lam.numerator - lam.denominator
        mres = [[e, c.to_json()] for e, c in sorted(diff.terms.items())]
    except NotScalarError as e:
        mres = [str(e)]
    return DoubleSwapReport(str(kind), order, prod.unit_residual(), mres)


# ---------------------------------------------------------------- delta substitution

class NonSeparableError(ValueError):
    pass


def delta_contract(terms: Mapping[tuple, object], shift=1) -> FormalSeries:
    """delta(shift * z1 / z2) * f(z1, z2) -> f(z1, shift * z1), returned as a series in z1.

    ``terms`` maps (a, b) to the coefficient of z1^a z2^b; only finite sums are accepted.
    The result's delta factor is implicit.
    """
    if not isinstance(terms, Mapping):
        raise NonSeparableError("expected a finite map of monomials")
    s = FieldElement.coerce(shift)
    out: dict = {}
    for key, c in terms.items():
        if not (isinstance(key, tuple) and len(key) == 2):
            raise NonSeparableError(f"bad monomial key {key!r}")
        a, b = _half(key[0]), _half(key[1])
        if b.denominator != 1:
            raise NonSeparableError("half-integer power of z2 under the substitution")
        e = a + b
        t = FieldElement.coerce(c) * s ** int(b)
        out[e] = out[e] + t if e in out else t
    exps = [e for e, c in out.items() if not c.is_zero()] or [Fraction(0)]
    return FormalSeries(out, min(exps), max(exps), UP)


def laurent_to_series(p: LaurentPoly, order: int, direction: str = UP) -> FormalSeries:
    if not p.terms:
        return FormalSeries({}, 0, order, direction) if direction == UP else FormalSeries({}, -order, 0, direction)
    start = min(min(p.terms), 0) if direction == UP else max(max(p.terms), 0)
    return FormalSeries.from_terms(p.terms, order, direction, shift=start)

"""The trigonometric R-matrix on V (x) V and its checks: Yang-Baxter, intertwining,
unitarity, and the one-dimensional classical invariant in V (x) V.

Entries are stored as numerator Laurent polynomials over the common denominator
D(z) = (1 - q^2 z)(1 - xi z), which keeps every check polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import flint

from .cartan import AlgebraKind
from .exactla import SMat, nullspace
from .scalar import FieldElement
from .vecrep import (GeneratorLabel, LaurentMatrix, LaurentPoly, all_labels, cartan,
                     coproduct_matrix, xi_exponent)

# Normative conventions, each pinned by a regression test.
YBE_PATTERN = "R12(z/w) R13(z) R23(w) = R23(w) R13(z) R12(z/w)"
INTERTWINING_ORIENTATION = "R(z) Delta(g) = Delta'(g) R(z)"


def _lp(terms: dict) -> LaurentPoly:
    return LaurentPoly({e: FieldElement.coerce(c) for e, c in terms.items()})


@dataclass
class RMatrix:
    """R-bar(z) = numerator(z) / ((1 - q^2 z)(1 - xi z)) on V (x) V."""

    kind: AlgebraKind
    numerator: LaurentMatrix  # positions a*N + b
    denominator: LaurentPoly
    xi_exp: int

    @property
    def N(self) -> int:
        return cartan(self.kind).N

    def pair_index(self, i: int, j: int) -> int:
        cd = cartan(self.kind)
        return cd.position(i) * cd.N + cd.position(j)

    def entry(self, row: tuple, col: tuple) -> tuple[LaurentPoly, LaurentPoly]:
        k = (self.pair_index(*row), self.pair_index(*col))
        return self.numerator.entries.get(k, LaurentPoly()), self.denominator

    def specialize(self, v, z) -> SMat:
        """Exact rational evaluation at (v, z)."""
        v, z = Fraction(v), Fraction(z)
        den = _ev(self.denominator, v, z)
        if den == 0:
            raise ZeroDivisionError("sample hits a pole of R")
        ent = {k: _ev(p, v, z) / den for k, p in self.numerator.entries.items()}
        return SMat.from_entries(ent)

    def specialize_v(self, v) -> tuple[dict, flint.fmpq_poly]:
        """Specialize v only: numerator entries as flint polynomials in z (non-negative powers)."""
        v = Fraction(v)
        conv = lambda p: flint.fmpq_poly([_q(c.specialize(v)) for c in _dense(p)])
        return ({k: conv(p) for k, p in self.numerator.entries.items()}, conv(self.denominator))

    def to_json(self) -> dict:
        cd = cartan(self.kind)
        J, N = cd.index_set, cd.N
        out = []
        for (r, c), p in sorted(self.numerator.entries.items()):
            out.append({"row": [J[r // N], J[r % N]], "col": [J[c // N], J[c % N]],
                        "num": [[e, x.to_json()] for e, x in sorted(p.terms.items())]})
        return {"kind": str(self.kind), "denominator": [[e, x.to_json()] for e, x in
                                                        sorted(self.denominator.terms.items())],
                "entries": out}


def _q(x: Fraction) -> flint.fmpq:
    return flint.fmpq(x.numerator, x.denominator)


def _dense(p: LaurentPoly) -> list:
    if not p.terms:
        return [FieldElement(0)]
    lo = min(p.terms)
    if lo < 0:
        raise ValueError("negative z power in numerator")
    return [p.terms.get(e, FieldElement(0)) for e in range(max(p.terms) + 1)]


def _ev(p: LaurentPoly, v: Fraction, z: Fraction) -> Fraction:
    return sum((c.specialize(v) * z ** e for e, c in p.terms.items()), Fraction(0))


@lru_cache(maxsize=None)
def build_rbar(kind: AlgebraKind, mutate: str | None = None) -> RMatrix:
    """Assemble the four blocks of R-bar.  ``mutate`` names a single-sign fault for tests."""
    cd = cartan(kind)
    J, N = cd.index_set, cd.N
    m = xi_exponent(kind)
    q = FieldElement.q
    one = FieldElement(1)
    xi = q(m)
    D1 = _lp({0: one, 1: -q(2)})
    Dxi = _lp({0: one, 1: -xi})
    den = D1 * Dxi
    pos = cd.position
    idx = lambda i, j: pos(i) * N + pos(j)
    ent: dict = {}

    def put(r, c, p):
        k = (idx(*r), idx(*c))
        ent[k] = ent[k] + p if k in ent else p

    for i in J:
        if i != 0:
            put((i, i), (i, i), den)
    for i in J:
        for j in J:
            if i != j and i != -j:
                put((i, j), (i, j), _lp({0: q(1), 1: -q(1)}) * Dxi)
    c0 = one - q(2)
    if mutate == "swap-sign":
        c0 = q(2) - one
    for i in J:
        for j in J:
            if i == j or i == -j:
                continue
            zp = 0 if cd.order_precede(i, j) else 1
            put((i, j), (j, i), _lp({zp: c0}) * Dxi)
    for i in J:
        for j in J:
            bi, bj = cd.bar_index(i), cd.bar_index(j)
            dij = 1 if i == -j else 0
            if i == j:
                a = _lp({0: q(2), 1: -xi}) * _lp({0: one, 1: -one})
                if i == 0:
                    a = a + _lp({0: q(1), 1: one}) * Dxi * (one - q(1))
            elif cd.order_precede(i, j):
                a = (_lp({1: one, 0: -one}) * q(bj - bi) + _lp({0: one, 1: -xi}) * dij) * (one - q(2))
            else:
                a = _lp({1: one}) * (_lp({1: one, 0: -one}) * (xi * q(bj - bi))
                                     + _lp({0: one, 1: -xi}) * dij) * (one - q(2))
            put((i, -i), (j, -j), a)
    return RMatrix(kind, LaurentMatrix(N * N, ent), den, m)


# ---------------------------------------------------------------- Yang-Baxter

def _flip_perm(N: int) -> list[int]:
    return [(a % N) * N + a // N for a in range(N * N)]


def _embed(R: SMat, N: int, slots: tuple[int, int], one=Fraction(1)) -> SMat:
    """R acting on factors (slots) of V^(x)3."""
    ident = SMat.identity(N, one)
    if slots == (0, 1):
        return R.kron(ident, N)
    if slots == (1, 2):
        return ident.kron(R, N * N)
    # (0, 2): conjugate R12 by the swap of factors 2 and 3
    R12 = R.kron(ident, N)
    perm = [((a // (N * N)) * N * N + (a % N) * N + (a // N) % N) for a in range(N ** 3)]
    return R12.permute(perm)


@dataclass
class YBEReport:
    pattern: str
    points: list
    max_residual: list
    exact_in_z: bool = False

    @property
    def ok(self) -> bool:
        return all(r == 0 for r in self.max_residual)

    def to_json(self):
        return {"pattern": self.pattern, "points": [[str(x) for x in p] for p in self.points],
                "max_residual": [str(x) for x in self.max_residual],
                "exact_in_z": self.exact_in_z, "ok": self.ok}


PATTERNS = {
    "z/w,z,w": lambda z, w: (z / w, z, w),
    "z,zw,w": lambda z, w: (z, z * w, w),
    "w,z,z/w": lambda z, w: (w, z, z / w),
    "z,w,z/w": lambda z, w: (z, w, z / w),
}


def ybe_residual(R: RMatrix, v, z, w, pattern: str = "z/w,z,w") -> SMat:
    a, b, c = PATTERNS[pattern](Fraction(z), Fraction(w))
    N = R.N
    R12 = _embed(R.specialize(v, a), N, (0, 1))
    R13 = _embed(R.specialize(v, b), N, (0, 2))
    R23 = _embed(R.specialize(v, c), N, (1, 2))
    return R12 @ R13 @ R23 - R23 @ R13 @ R12


def check_ybe(kind: AlgebraKind, mode: str = "sampled", samples=None,
              pattern: str = "z/w,z,w", R: RMatrix | None = None) -> YBEReport:
    R = build_rbar(kind) if R is None else R
    if mode == "sampled":
        samples = samples or [(Fraction(2, 3), 5, 7), (Fraction(3, 5), Fraction(7, 2), -3),
                              (Fraction(5, 4), Fraction(-2, 3), Fraction(9, 5))]
        res = [ybe_residual(R, *p, pattern=pattern).max_abs() for p in samples]
        return YBEReport(pattern, [tuple(Fraction(x) for x in p) for p in samples], res)
    if mode == "exact":
        samples = samples or [(Fraction(2, 3), Fraction(7))]
        res = [_ybe_exact_z(R, Fraction(v), Fraction(w)) for v, w in samples]
        return YBEReport(pattern, [tuple(Fraction(x) for x in p) for p in samples], res, True)
    raise ValueError(f"unknown mode {mode!r}")


def _ybe_exact_z(R: RMatrix, v: Fraction, w: Fraction):
    """Residual with z symbolic (v, w fixed), denominators cleared; returns max |coefficient|."""
    num, _ = R.specialize_v(v)
    N = R.N
    wq = _q(w)

    def scaled(s):  # numerator at s*z as fmpq_poly in z
        return {k: flint.fmpq_poly([c * s ** e for e, c in enumerate(p.coeffs())])
                for k, p in num.items()}

    def const_poly(p, x):  # numerator evaluated at constant x, as constant polynomial
        return {k: flint.fmpq_poly([p_(x)]) for k, p_ in p.items()}

    one = flint.fmpq_poly([1])
    R12 = _embed(SMat.from_entries(scaled(1 / wq)), N, (0, 1), one)
    R13 = _embed(SMat.from_entries(scaled(flint.fmpq(1))), N, (0, 2), one)
    R23 = _embed(SMat.from_entries(const_poly(num, wq)), N, (1, 2), one)
    diff = R12 @ R13 @ R23 - R23 @ R13 @ R12
    worst = Fraction(0)
    for _, p in diff.entries():
        for c in p.coeffs():
            worst = max(worst, abs(Fraction(int(c.p), int(c.q))))
    return worst


def detect_ybe_patterns(kind: AlgebraKind, sample=(Fraction(2, 3), 5, 7)) -> list[str]:
    R = build_rbar(kind)
    return [p for p in PATTERNS if ybe_residual(R, *sample, pattern=p).is_zero()]


# ---------------------------------------------------------------- intertwining

def _flip(M: LaurentMatrix, N: int) -> LaurentMatrix:
    perm = _flip_perm(N)
    return LaurentMatrix(M.dim, {(perm[r], perm[c]): p for (r, c), p in M.entries.items()})


@dataclass
class IntertwiningReport:
    orientation: str | None
    forward_failures: list
    backward_failures: list

    @property
    def ok(self):
        return self.orientation is not None

    def to_json(self):
        return {"orientation": self.orientation, "forward_failures": self.forward_failures,
                "backward_failures": self.backward_failures, "ok": self.ok}


class OrientationError(RuntimeError):
    pass


def check_intertwining(kind: AlgebraKind, labels=None, R: RMatrix | None = None) -> IntertwiningReport:
    """Decide which of R Delta = Delta' R or R Delta' = Delta R holds for all generators."""
    R = build_rbar(kind) if R is None else R
    cd = cartan(kind)
    labels = labels or all_labels(cd.n)
    Rn = R.numerator
    fwd, bwd = [], []
    for g in labels:
        D = coproduct_matrix(kind, g)
        Dp = coproduct_matrix(kind, g, opposite=True)
        if not (Rn @ D - Dp @ Rn).is_zero():
            fwd.append(str(g))
        if not (Rn @ Dp - D @ Rn).is_zero():
            bwd.append(str(g))
    if not fwd and bwd:
        o = INTERTWINING_ORIENTATION
    elif fwd and not bwd:
        o = "R(z) Delta'(g) = Delta(g) R(z)"
    elif not fwd and not bwd:
        o = "both"
    else:
        o = None
    return IntertwiningReport(o, fwd, bwd)


# ---------------------------------------------------------------- unitarity

@dataclass
class Unitarity:
    numerator: LaurentPoly
    denominator: LaurentPoly

    @property
    def is_one(self) -> bool:
        return (self.numerator - self.denominator).is_zero()

    def evaluate(self, v, z) -> Fraction:
        return _ev(self.numerator, Fraction(v), Fraction(z)) / _ev(self.denominator, Fraction(v), Fraction(z))


class NotScalarError(RuntimeError):
    pass


def _invert_z(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly({-e: c for e, c in p.terms.items()})


def unitarity_scalar(kind: AlgebraKind, R: RMatrix | None = None) -> Unitarity:
    """lambda(z) with R(z) P R(1/z) P = lambda(z) Id."""
    R = build_rbar(kind) if R is None else R
    N = R.N
    inv = LaurentMatrix(N * N, {k: _invert_z(p) for k, p in R.numerator.entries.items()})
    prod = R.numerator @ _flip(inv, N)
    # R(z) P R(1/z) P: conjugating R(1/z) by P equals flipping both indices
    diag = [prod.entries.get((a, a), LaurentPoly()) for a in range(N * N)]
    off = [k for k in prod.entries if k[0] != k[1]]
    if off or any(not (d - diag[0]).is_zero() for d in diag):
        raise NotScalarError("R(z) P R(1/z) P is not scalar")
    den = R.denominator * _invert_z(R.denominator)
    return Unitarity(diag[0], den)


# ---------------------------------------------------------------- invariant vector

class InvariantDimensionError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def invariant_vector(kind: AlgebraKind) -> dict:
    """The classical invariant in V (x) V, normalized so that the v_1 (x) v_-1 coefficient is 1.

    Returns {(i, j): FieldElement}, supported on pairs (j, -j).
    """
    cd = cartan(kind)
    J, N = cd.index_set, cd.N
    pos = cd.position
    # weight-zero fixed space of all Delta(t_i)
    cands = []
    for a in J:
        for b in J:
            k = pos(a) * N + pos(b)
            if all(coproduct_matrix(kind, GeneratorLabel("t", i)).entries[(k, k)].terms.get(0)
                   == FieldElement(1) for i in range(cd.n + 1)):
                cands.append((a, b))
    cols = [pos(a) * N + pos(b) for a, b in cands]
    rows = []
    for i in range(1, cd.n + 1):
        for kname in ("e", "f"):
            M = coproduct_matrix(kind, GeneratorLabel(kname, i))
            by_row: dict = {}
            for (r, c), p in M.entries.items():
                if c in cols:
                    by_row.setdefault(r, {})[cols.index(c)] = p.terms.get(0, FieldElement(0))
            for r, d in by_row.items():
                rows.append([d.get(k, FieldElement(0)) for k in range(len(cols))])
    basis = nullspace(rows, len(cols), FieldElement(0), FieldElement(1))
    if len(basis) != 1:
        raise InvariantDimensionError(f"invariant space has dimension {len(basis)}")
    vec = basis[0]
    ref = vec[cands.index((1, -1))]
    return {pair: x / ref for pair, x in zip(cands, vec) if not x.is_zero()}


def invariant_dimension(kind: AlgebraKind) -> int:
    try:
        invariant_vector(kind)
        return 1
    except InvariantDimensionError as e:
        return int(str(e).split()[-1])

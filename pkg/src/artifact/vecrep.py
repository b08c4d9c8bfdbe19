"""The N-dimensional vector representation with spectral parameter, its defining-relation
checks, coproduct and dual actions, and the duality maps that fix the shift xi.

Spectral dependence is carried by Laurent polynomials in a single variable z.  For
two-slot objects the slots carry z and 1, which loses nothing because every coproduct
image is homogeneous in the pair of spectral parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .cartan import AlgebraKind, CartanData, build_cartan
from .scalar import FieldElement, q_factorial


# ---------------------------------------------------------------- Laurent data

class LaurentPoly:
    """Finite sum c_e z^e with coefficients in any exact field (FieldElement or Fraction)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c, e: int = 0) -> "LaurentPoly":
        return cls({e: c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def substitute_scale(self, s) -> "LaurentPoly":
        """z -> s*z."""
        return LaurentPoly({e: c * s ** e for e, c in self.terms.items()})

    def map_coeffs(self, fn: Callable) -> "LaurentPoly":
        return LaurentPoly({e: fn(c) for e, c in self.terms.items()})

    def evaluate(self, z):
        acc = 0
        for e, c in self.terms.items():
            acc = acc + c * z ** e
        return acc

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and (self - other).is_zero()

    def __repr__(self):
        return " + ".join(f"({c})z^{e}" for e, c in sorted(self.terms.items())) or "0"


@dataclass
class LaurentMatrix:
    """Sparse square matrix of LaurentPoly entries; rows/cols are positions 0..dim-1."""

    dim: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: p for k, p in self.entries.items() if not p.is_zero()}

    @classmethod
    def identity(cls, dim: int, one=None) -> "LaurentMatrix":
        one = FieldElement(1) if one is None else one
        return cls(dim, {(i, i): LaurentPoly.const(one) for i in range(dim)})

    def __add__(self, other):
        out = dict(self.entries)
        for k, p in other.entries.items():
            out[k] = out[k] + p if k in out else p
        return LaurentMatrix(self.dim, out)

    def __neg__(self):
        return LaurentMatrix(self.dim, {k: -p for k, p in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentMatrix":
        if isinstance(c, LaurentPoly):
            return LaurentMatrix(self.dim, {k: p * c for k, p in self.entries.items()})
        return LaurentMatrix(self.dim, {k: p * c for k, p in self.entries.items()})

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        by_row: dict = {}
        for (k, j), p in other.entries.items():
            by_row.setdefault(k, []).append((j, p))
        out: dict = {}
        for (i, k), p in self.entries.items():
            for j, p2 in by_row.get(k, ()):
                t = p * p2
                out[(i, j)] = out[(i, j)] + t if (i, j) in out else t
        return LaurentMatrix(self.dim, out)

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.dim, {(j, i): p for (i, j), p in self.entries.items()})

    def kron(self, other: "LaurentMatrix") -> "LaurentMatrix":
        d = other.dim
        out = {}
        for (i, j), p in self.entries.items():
            for (k, l), p2 in other.entries.items():
                out[(i * d + k, j * d + l)] = p * p2
        return LaurentMatrix(self.dim * d, out)

    def substitute_scale(self, s) -> "LaurentMatrix":
        return LaurentMatrix(self.dim, {k: p.substitute_scale(s) for k, p in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def power(self, k: int) -> "LaurentMatrix":
        out = LaurentMatrix.identity(self.dim)
        for _ in range(k):
            out = out @ self
        return out

    def to_json(self) -> list:
        return [{"row": i, "col": j,
                 "terms": [[e, c.to_json() if hasattr(c, "to_json") else str(c)]
                           for e, c in sorted(p.terms.items())]}
                for (i, j), p in sorted(self.entries.items())]


# ---------------------------------------------------------------- generators

@dataclass(frozen=True)
class GeneratorLabel:
    kind: str  # e | f | t | t_inv
    node: int

    def __post_init__(self):
        if self.kind not in ("e", "f", "t", "t_inv"):
            raise ValueError(f"bad generator kind {self.kind!r}")
        if self.node < 0:
            raise ValueError("node must be non-negative")

    def __str__(self):
        return f"{self.kind}_{self.node}"


def all_labels(n: int) -> list[GeneratorLabel]:
    return [GeneratorLabel(k, i) for i in range(n + 1) for k in ("e", "f", "t", "t_inv")]


def _unit(cd: CartanData, i: int, j: int, c=1) -> tuple:
    return (cd.position(i), cd.position(j)), LaurentPoly.const(FieldElement.coerce(c))


def _diag_q(cd: CartanData, exps: Callable[[int], int], sign: int = 1) -> LaurentMatrix:
    return LaurentMatrix(cd.N, {(cd.position(j), cd.position(j)):
                                LaurentPoly.const(FieldElement.q(sign * exps(j)))
                                for j in cd.index_set})


def _t_exponent(cd: CartanData, i: int) -> Callable[[int], int]:
    n, series = cd.n, cd.kind.series
    d = lambda a, b: 1 if a == b else 0
    if i == 0:
        return lambda j: -d(j, 1) - d(j, 2) + d(j, -1) + d(j, -2)
    if i < n:
        return lambda j: d(j, i) - d(j, i + 1) + d(j, -i - 1) - d(j, -i)
    if series == "B":
        return lambda j: d(j, n) - d(j, -n)
    return lambda j: d(j, n - 1) + d(j, n) - d(j, -n) - d(j, -n + 1)


def _e_matrix(cd: CartanData, i: int) -> LaurentMatrix:
    n, s = cd.n, cd.sign
    if i == 0:
        ent = dict([_unit(cd, -1, 2, s), _unit(cd, -2, 1, -s)])
    elif i < n:
        ent = dict([_unit(cd, i, i + 1), _unit(cd, -i - 1, -i, -1)])
    elif cd.kind.series == "B":
        a = FieldElement.alpha()
        ent = dict([_unit(cd, n, 0, a), _unit(cd, 0, -n, -a)])
    else:
        ent = dict([_unit(cd, n - 1, -n), _unit(cd, n, -n + 1, -1)])
    return LaurentMatrix(cd.N, ent)


def generator_matrix(kind: AlgebraKind, g: GeneratorLabel, spectral: bool = True) -> LaurentMatrix:
    """pi_z(g); e_0 carries z and f_0 carries 1/z when spectral is set."""
    cd = cartan(kind)
    if g.node > cd.n:
        raise ValueError(f"node {g.node} out of range for {kind}")
    if g.kind in ("t", "t_inv"):
        return _diag_q(cd, _t_exponent(cd, g.node), 1 if g.kind == "t" else -1)
    m = _e_matrix(cd, g.node)
    if g.kind == "f":
        m = m.transpose()
    if spectral and g.node == 0:
        zp = LaurentPoly.const(FieldElement(1), 1 if g.kind == "e" else -1)
        m = m.scale(zp)
    return m


@lru_cache(maxsize=None)
def cartan(kind: AlgebraKind) -> CartanData:
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_cartan(kind)


# ---------------------------------------------------------------- relations

@dataclass
class Violation:
    relation: str
    nodes: tuple
    residual: LaurentMatrix

    def to_json(self) -> dict:
        return {"relation": self.relation, "nodes": list(self.nodes),
                "residual": self.residual.to_json()}


def _rep(kind: AlgebraKind, mutate: Callable | None):
    cd = cartan(kind)
    mats = {}
    for g in all_labels(cd.n):
        m = generator_matrix(kind, g)
        if mutate is not None:
            m = mutate(g, m)
        mats[(g.kind, g.node)] = m
    return cd, mats


def sign_flip(label: GeneratorLabel) -> Callable:
    """Mutation negating the first nonzero entry of one generator (fault injection)."""
    def mutate(g, m):
        if g != label or not m.entries:
            return m
        k = min(m.entries)
        ent = dict(m.entries)
        ent[k] = -ent[k]
        return LaurentMatrix(m.dim, ent)
    return mutate


def verify_relations(kind: AlgebraKind, mutate: Callable | None = None,
                     mats: dict | None = None) -> list[Violation]:
    """Check every defining relation exactly; returns the violated ones.

    ``mutate(label, matrix)`` may alter generator matrices (fault injection).
    """
    cd = cartan(kind)
    if mats is None:
        _, mats = _rep(kind, mutate)
    n, N = cd.n, cd.N
    one = LaurentMatrix.identity(N)
    out: list[Violation] = []

    def check(name, nodes, m):
        if not m.is_zero():
            out.append(Violation(name, nodes, m))

    e = lambda i: mats[("e", i)]
    f = lambda i: mats[("f", i)]
    t = lambda i: mats[("t", i)]
    ti = lambda i: mats[("t_inv", i)]
    for i in range(n + 1):
        check("t t^-1 = 1", (i,), t(i) @ ti(i) - one)
        for j in range(n + 1):
            check("t_i t_j = t_j t_i", (i, j), t(i) @ t(j) - t(j) @ t(i))
            a = int(cd.pairing(i, j) * 2)  # in units of v, q^(a_ij) = v^(2(ai|aj))
            check("t e t^-1 = q^(ai|aj) e", (i, j),
                  t(i) @ e(j) @ ti(i) - e(j).scale(FieldElement.v(a)))
            check("t f t^-1 = q^-(ai|aj) f", (i, j),
                  t(i) @ f(j) @ ti(i) - f(j).scale(FieldElement.v(-a)))
            comm = e(i) @ f(j) - f(j) @ e(i)
            if i == j:
                vi = cd.v_exponent(i)
                denom = FieldElement.v(vi) - FieldElement.v(-vi)
                comm = comm - (t(i) - ti(i)).scale(denom.inverse())
            check("[e_i, f_j] = delta_ij (t_i - t_i^-1)/(q_i - q_i^-1)", (i, j), comm)
    for i in range(n + 1):
        vi = cd.v_exponent(i)
        for j in range(n + 1):
            if i == j:
                continue
            b = 1 - cd.cartan_integer(i, j)
            for name, x in (("q-Serre e", e), ("q-Serre f", f)):
                acc = LaurentMatrix(N)
                for k in range(b + 1):
                    c = q_factorial(k, vi) * q_factorial(b - k, vi)
                    term = x(i).power(k) @ x(j) @ x(i).power(b - k)
                    term = term.scale(c.inverse() * (-1) ** k)
                    acc = acc + term
                check(name, (i, j), acc)
    return out


def weight_pairing_check(kind: AlgebraKind) -> bool:
    """pi(t_i) v_j = q^{(wt v_j | alpha_i)} v_j."""
    cd = cartan(kind)
    for i in range(cd.n + 1):
        m = generator_matrix(kind, GeneratorLabel("t", i))
        root = cd.simple_roots[i]
        for j in cd.index_set:
            w = cd.weight(j)
            p = sum(a * b for a, b in zip(w, root[: cd.n]))
            pos = cd.position(j)
            if m.entries[(pos, pos)].terms[0] != FieldElement.q(int(p)):
                return False
    return True


# ---------------------------------------------------------------- coproduct and duals

def antipode_image(kind: AlgebraKind, g: GeneratorLabel, inverse: bool = False,
                   mats: dict | None = None) -> LaurentMatrix:
    """pi_z(S(g)) or pi_z(S^-1(g)) with S(e)=-t^-1 e, S(f)=-f t, S(t)=t^-1."""
    if mats is None:
        get = lambda k, i: generator_matrix(kind, GeneratorLabel(k, i))
    else:
        get = lambda k, i: mats[(k, i)]
    i = g.node
    if g.kind == "t":
        return get("t_inv", i)
    if g.kind == "t_inv":
        return get("t", i)
    if g.kind == "e":
        m = get("e", i) @ get("t_inv", i) if inverse else get("t_inv", i) @ get("e", i)
    else:
        m = get("t", i) @ get("f", i) if inverse else get("f", i) @ get("t", i)
    return -m


def dual_matrix(kind: AlgebraKind, g: GeneratorLabel, side: str = "right",
                mats: dict | None = None) -> LaurentMatrix:
    """Action on the dual basis: right dual uses S^-1, left dual uses S."""
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    return antipode_image(kind, g, inverse=(side == "right"), mats=mats).transpose()


def coproduct_matrix(kind: AlgebraKind, g: GeneratorLabel, opposite: bool = False,
                     mats: dict | None = None) -> LaurentMatrix:
    """(pi_z (x) pi_1) Delta(g) on V (x) V, or the opposite coproduct."""
    N = cartan(kind).N
    if mats is None:
        get = lambda k, i: generator_matrix(kind, GeneratorLabel(k, i))
    else:
        get = lambda k, i: mats[(k, i)]
    i = g.node
    one = LaurentMatrix.identity(N)
    # slot 2 sits at spectral parameter 1
    at1 = lambda m: LaurentMatrix(m.dim, {k: LaurentPoly.const(p.evaluate(FieldElement(1)))
                                          for k, p in m.entries.items()})
    if g.kind in ("t", "t_inv"):
        m = get(g.kind, i)
        return m.kron(at1(m))
    x = get(g.kind, i)
    if g.kind == "e":
        left, right = (x, one), (get("t", i), x)
    else:
        left, right = (x, get("t_inv", i)), (one, x)
    if not opposite:
        return left[0].kron(at1(left[1])) + right[0].kron(at1(right[1]))
    # opposite: swap tensor factors, slot 1 still carries z
    return at1_swap(left, right, at1)


def at1_swap(left, right, at1):
    return left[1].kron(at1(left[0])) + right[1].kron(at1(right[0]))


# ---------------------------------------------------------------- duality and xi

def duality_matrix(kind: AlgebraKind, sign: int = 1) -> LaurentMatrix:
    """C_(+/-): v_j -> q^{bar(+/-j)} v*_{-j}."""
    cd = cartan(kind)
    ent = {}
    for j in cd.index_set:
        ent[(cd.position(-j), cd.position(j))] = LaurentPoly.const(
            FieldElement.q(cd.bar_index(sign * j)))
    return LaurentMatrix(cd.N, ent)


@dataclass
class XiReport:
    xi: FieldElement
    exponent: int
    sign: int
    checked: list
    candidates_tried: int

    def to_json(self):
        return {"xi": f"{'-' if self.sign < 0 else ''}q^{self.exponent}",
                "exponent": self.exponent, "sign": self.sign,
                "checked_generators": self.checked,
                "candidates_tried": self.candidates_tried}


def intertwines(kind: AlgebraKind, xi: FieldElement, sign: int = 1,
                mats: dict | None = None) -> list[str]:
    """Generators g for which C_sign . pi_{z xi^-sign}(g) != pi*(g) . C_sign; empty means success."""
    cd = cartan(kind)
    C = duality_matrix(kind, sign)
    side = "left" if sign > 0 else "right"
    shift = xi ** (-sign)
    bad = []
    for g in all_labels(cd.n):
        src = generator_matrix(kind, g) if mats is None else mats[(g.kind, g.node)]
        lhs = C @ src.substitute_scale(shift)
        rhs = dual_matrix(kind, g, side, mats=mats) @ C
        if not (lhs - rhs).is_zero():
            bad.append(str(g))
    return bad


class NoXiError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def derive_xi(kind: AlgebraKind, search: int = 0) -> XiReport:
    """Find the unique monomial xi = +/- q^m making both C_+ and C_- intertwiners."""
    cd = cartan(kind)
    span = search or 3 * cd.N
    hits = []
    tried = 0
    for m in range(-span, span + 1):
        for s in (1, -1):
            tried += 1
            cand = FieldElement.q(m) * s
            if not intertwines(kind, cand, 1) and not intertwines(kind, cand, -1):
                hits.append((m, s, cand))
    if len(hits) != 1:
        raise NoXiError(f"expected one solution, found {len(hits)}")
    m, s, cand = hits[0]
    return XiReport(cand, m, s, [str(g) for g in all_labels(cd.n)], tried)


def xi_of(kind: AlgebraKind) -> FieldElement:
    return derive_xi(kind).xi


def xi_exponent(kind: AlgebraKind) -> int:
    r = derive_xi(kind)
    if r.sign != 1:
        raise NoXiError("negative xi is not supported downstream")
    return r.exponent

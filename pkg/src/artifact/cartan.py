"""Root data, index set and orderings for the affine orthogonal types B_n^(1) and D_n^(1)."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction


class CartanError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraKind:
    series: str
    rank: int

    def __post_init__(self):
        if self.series not in ("B", "D"):
            raise CartanError(f"unknown series {self.series!r}")
        if self.series == "B" and self.rank < 2:
            raise CartanError("type B needs rank >= 2")
        if self.series == "D" and self.rank < 3:
            raise CartanError("type D needs rank >= 3")

    @property
    def N(self) -> int:
        return 2 * self.rank + (1 if self.series == "B" else 0)

    def __str__(self):
        return f"{self.series}{self.rank}"


Vec = tuple  # epsilon coordinates (Fractions), plus a trailing delta coordinate


@dataclass(frozen=True)
class CartanData:
    kind: AlgebraKind
    simple_roots: tuple          # alpha_0..alpha_n, each (eps_1..eps_n, delta)
    marks: tuple
    comarks: tuple
    dual_coxeter: int
    fundamental_weights_bar: tuple  # Lambda-bar_0..Lambda-bar_n in eps coordinates
    rho_bar: tuple
    index_set: tuple
    N: int
    sign: int
    bar: dict = field(repr=False)

    @property
    def n(self) -> int:
        return self.kind.rank

    def pairing(self, i: int, j: int) -> Fraction:
        n = self.n
        if not (0 <= i <= n and 0 <= j <= n):
            raise CartanError(f"node index out of range: {(i, j)}")
        a, b = self.simple_roots[i], self.simple_roots[j]
        return sum((x * y for x, y in zip(a[:n], b[:n])), Fraction(0))

    def v_exponent(self, i: int) -> int:
        """q_i = v**v_exponent(i), since q_i = q^((alpha_i|alpha_i)/2) and q = v^2."""
        return int(self.pairing(i, i))

    def cartan_integer(self, i: int, j: int) -> int:
        return int(2 * self.pairing(i, j) / self.pairing(i, i))

    def cartan_matrix(self) -> list[list[int]]:
        r = range(self.n + 1)
        return [[self.cartan_integer(i, j) for j in r] for i in r]

    def bar_index(self, j: int) -> int:
        if j not in self.bar:
            raise CartanError(f"{j} is not in the index set")
        return self.bar[j]

    def position(self, j: int) -> int:
        return self.index_set.index(j)

    def order_precede(self, i: int, j: int) -> bool:
        return self.position(i) < self.position(j)

    def weight(self, j: int) -> tuple:
        """Weight of v_j in eps coordinates."""
        w = [0] * self.n
        if j > 0:
            w[j - 1] = 1
        elif j < 0:
            w[-j - 1] = -1
        return tuple(w)

    def to_json(self) -> dict:
        fr = lambda v: [str(x) for x in v]
        return {
            "kind": self.kind.series, "rank": self.n,
            "simple_roots": [fr(a) for a in self.simple_roots],
            "marks": list(self.marks), "comarks": list(self.comarks),
            "dual_coxeter": self.dual_coxeter,
            "fundamental_weights_bar": [fr(w) for w in self.fundamental_weights_bar],
            "rho_bar": fr(self.rho_bar),
            "index_set": list(self.index_set), "N": self.N, "sign": self.sign,
            "bar": {str(k): v for k, v in self.bar.items()},
            "cartan_matrix": self.cartan_matrix(),
        }


def _eps(n: int, *coeffs) -> tuple:
    v = [Fraction(0)] * (n + 1)
    for k, c in coeffs:
        v[k - 1] = Fraction(c)
    return tuple(v)


def index_set(kind: AlgebraKind) -> tuple:
    n = kind.rank
    middle = (0,) if kind.series == "B" else ()
    return tuple(range(1, n + 1)) + middle + tuple(range(-n, 0))


def build_cartan(kind: AlgebraKind) -> CartanData:
    n, series = kind.rank, kind.series
    if series == "D" and n == 3:
        warnings.warn("D_3 is isomorphic to A_3; proceeding", stacklevel=2)
    delta = tuple([Fraction(0)] * n + [Fraction(1)])
    theta = _eps(n, (1, 1), (2, 1))
    alpha0 = tuple(d - t for d, t in zip(delta, theta))
    roots = [alpha0] + [_eps(n, (i, 1), (i + 1, -1)) for i in range(1, n)]
    if series == "B":
        roots.append(_eps(n, (n, 1)))
        marks = (1, 1) + (2,) * (n - 1)
    else:
        roots.append(_eps(n, (n - 1, 1), (n, 1)))
        marks = (1, 1) + (2,) * (n - 3) + (1, 1)
    roots = tuple(roots)
    norms = [sum(x * x for x in a[:n]) for a in roots]
    comarks = tuple(int(m * nn / 2) for m, nn in zip(marks, norms))
    h = sum(comarks)

    half = Fraction(1, 2)
    lam = [tuple([Fraction(0)] * n)]
    for i in range(1, n + 1):
        w = [Fraction(0)] * n
        if series == "B" and i == n:
            w = [half] * n
        elif series == "D" and i == n - 1:
            w = [half] * (n - 1) + [-half]
        elif series == "D" and i == n:
            w = [half] * n
        else:
            for k in range(i):
                w[k] = Fraction(1)
        lam.append(tuple(w))
    rho = tuple(sum(lam[i][k] for i in range(1, n + 1)) for k in range(n))

    J = index_set(kind)
    N = len(J)
    sign = (-1) ** n if series == "B" else (-1) ** (n - 1)
    bar = {j: (j if j > 0 else (n if j == 0 else j + N)) for j in J}
    data = CartanData(kind, roots, marks, comarks, h, tuple(lam), rho, J, N, sign, bar)
    _check(data)
    return data


def _check(data: CartanData) -> None:
    n = data.n
    theta = tuple(-x for x in data.simple_roots[0][:n])
    if sum(x * x for x in theta) != 2:
        raise CartanError("highest root normalization failed")
    expected = 2 * n - 1 if data.kind.series == "B" else 2 * n - 2
    if data.dual_coxeter != expected:
        raise CartanError("dual Coxeter number mismatch")
    # delta = sum a_i alpha_i has zero finite part
    fin = [sum(m * a[k] for m, a in zip(data.marks, data.simple_roots)) for k in range(n)]
    if any(fin):
        raise CartanError("marks do not annihilate the finite part")

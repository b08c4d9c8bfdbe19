"""Quantum affine Clifford algebras on Z and Z+1/2 mode lattices and their Fock modules.

Degrees and modes are handled internally as doubled integers (d2 = 2d, m2 = 2m).
"""
from __future__ import annotations

import itertools
import logging
import os
import pickle
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import flint
import numpy as np

from . import _kernels
from .cartan import AlgebraKind
from .conventions import ledger_hash
from .rmatrix import build_rbar, invariant_vector
from .scalar import FieldElement
from .series import clifford_scalars, laurent_to_series
from .vecrep import cartan, xi_exponent

log = logging.getLogger(__name__)

LATTICES = ("Z", "Z+1/2")
PRIMES = (67108859, 67108837, 67108819, 67108777, 67108763)
CACHE_ENV = "ARTIFACT_CACHE_DIR"


class CliffordError(ValueError):
    pass


class CutoffError(CliffordError):
    pass


class DegreeOverflowError(CliffordError):
    pass


class InconsistentQuotientError(RuntimeError):
    pass


@dataclass(frozen=True)
class CliffordType:
    kind: AlgebraKind
    lattice: str

    def __post_init__(self):
        if self.lattice not in LATTICES:
            raise CliffordError(f"lattice must be one of {LATTICES}")
        if self.half and self.kind.series != "D":
            raise CliffordError("the half-integer lattice needs N = 2n (type D)")

    @property
    def half(self) -> bool:
        return self.lattice == "Z+1/2"

    @property
    def parity(self) -> int:
        """Parity of doubled modes."""
        return 1 if self.half else 0

    @property
    def module_choice(self) -> str:
        n = self.kind.rank
        if self.kind.series == "B":
            return f"L{n}"
        return "L0+L1" if self.half else f"L{n - 1}+L{n}"

    def degrees2(self, max_d2: int) -> list[int]:
        return list(range(0, max_d2 + 1, 1 if self.half else 2))

    def __str__(self):
        return f"{self.kind}/{self.lattice}"


@dataclass(frozen=True)
class ModeGenerator:
    color: int
    mode: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mode", Fraction(self.mode))

    @property
    def degree(self) -> Fraction:
        return -self.mode

    @property
    def m2(self) -> int:
        return int(2 * self.mode)

    def __str__(self):
        return f"Psi_{self.color}({self.mode})"


def _d2(x) -> int:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise CliffordError(f"{x} is not a half-integer")
    return int(2 * x)


# ---------------------------------------------------------------- relation data

@dataclass
class RelationData:
    """Coefficients of the mode relations in one scalar representation."""

    ctype: CliffordType
    f: list
    H: list            # H[k][(a, b)] = {(d, c): h_k}
    Fvec: dict
    xi_pow: dict       # e -> xi^e
    zero: object
    mul: object = None  # scalar product, reduced for modular data

    @property
    def K(self) -> int:
        return len(self.f)

    def terms(self, al, be, a2, b2) -> list:
        """(coef, (outer m2, colour), (inner m2, colour)) for LHS - RHS of the (al, be, a, b) relation."""
        out = []
        for k in range(self.K):
            c = self.f[k]
            if c != 0:
                out.append((c, (a2 - 2 * k, al), (b2 + 2 * k, be)))
        for k in range(self.K):
            for (dl, ga), h in self.H[k].get((al, be), {}).items():
                out.append((-h, (b2 - 2 * k, ga), (a2 + 2 * k, dl)))
        return out

    def delta_exponent(self, a2: int) -> int:
        return -(a2 + 1) // 2 if self.ctype.half else -a2 // 2

    def delta(self, al, be, a2, b2):
        if a2 + b2 != 0:
            return None
        x = self.Fvec.get((al, be))
        if x is None:
            return None
        return self._mul(x, self.xi_pow[self.delta_exponent(a2)])

    def _mul(self, x, y):
        return x * y if self.mul is None else self.mul(x, y)

    def scale_F(self, s) -> "RelationData":
        return RelationData(self.ctype, self.f, self.H,
                            {k: self._mul(x, s) for k, x in self.Fvec.items()},
                            self.xi_pow, self.zero, self.mul)

    def map(self, conv, mul=None) -> "RelationData":
        return RelationData(
            self.ctype, [conv(x) for x in self.f],
            [{k: {kk: conv(x) for kk, x in d.items()} for k, d in Hk.items()} for Hk in self.H],
            {k: conv(x) for k, x in self.Fvec.items()},
            {e: conv(x) for e, x in self.xi_pow.items()}, conv(self.zero), mul)


def _rbar_series(kind: AlgebraKind, K: int) -> dict:
    R = build_rbar(kind)
    cd = cartan(kind)
    J, N = cd.index_set, cd.N
    den = laurent_to_series(R.denominator, K - 1).inverse()
    out = {}
    for (r, c), num in R.numerator.entries.items():
        s = laurent_to_series(num, K - 1) * den
        out[((J[r // N], J[r % N]), (J[c // N], J[c % N]))] = s
    return out


@lru_cache(maxsize=None)
def relation_data(ctype: CliffordType, K: int) -> RelationData:
    """Exact coefficients over Q(v): f_k, h_k for k < K, the invariant F and powers of xi."""
    kind = ctype.kind
    F, G = clifford_scalars(kind, K - 1)
    f = [F[-k] for k in range(K)]
    Rs = _rbar_series(kind, K)
    H = [dict() for _ in range(K)]
    for ((i, j), (k, l)), s in Rs.items():
        hs = G * s
        for n in range(K):
            x = hs[n]
            if not x.is_zero():
                # h_n[(j, i), (l, k)]: the reading with both tensor slots swapped
                H[n].setdefault((j, i), {})[(l, k)] = x
    Fvec = dict(invariant_vector(kind))
    xi = FieldElement.q(xi_exponent(kind))
    xi_pow = {e: xi ** e for e in range(-K - 2, K + 3)}
    return RelationData(ctype, f, H, Fvec, xi_pow, FieldElement(0))


@dataclass
class RelationOperator:
    colors: tuple
    a: Fraction
    b: Fraction
    terms: list          # (coef, left ModeGenerator, right ModeGenerator)
    delta: FieldElement | None

    def to_json(self) -> dict:
        return {"colors": list(self.colors), "a": str(self.a), "b": str(self.b),
                "terms": [[c.to_json(), str(x), str(y)] for c, x, y in self.terms],
                "delta": None if self.delta is None else self.delta.to_json()}


def mode_relations(t: CliffordType, i: int, j: int, a, b, cutoff: int,
                   state_degree=None) -> RelationOperator:
    """Relation extracted at z1^-a z2^-b; ``state_degree`` checks that ``cutoff`` covers every acting term."""
    a2, b2 = _d2(a), _d2(b)
    for x in (a2, b2):
        if x % 2 != t.parity:
            raise CliffordError(f"mode {Fraction(x, 2)} is off the {t.lattice} lattice")
    if state_degree is not None:
        need = (_d2(state_degree) - min(a2, b2)) // 2 + 1
        if cutoff < need:
            raise CutoffError(f"cutoff {cutoff} < {need} needed at degree {state_degree}")
    data = relation_data(t, cutoff)
    terms = [(c, ModeGenerator(x[1], Fraction(x[0], 2)), ModeGenerator(y[1], Fraction(y[0], 2)))
             for c, x, y in data.terms(i, j, a2, b2)]
    return RelationOperator((i, j), Fraction(a2, 2), Fraction(b2, 2), terms, data.delta(i, j, a2, b2))


# ---------------------------------------------------------------- scalar backends

class ModularBackend:
    name = "modular"

    def __init__(self, p: int, v: int):
        self.p, self.v = p, v

    def scalar(self, x) -> float:
        x = Fraction(x)
        d = x.denominator % self.p
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at this prime")
        return float(x.numerator * pow(d, -1, self.p) % self.p)

    def field(self, x: FieldElement) -> float:
        return self.scalar(x.specialize(self.v))

    def zeros(self, r, c):
        return np.zeros((r, c))

    def eye(self, n):
        return np.eye(n)

    def matmul(self, A, B):
        if A.shape[1] == 0:
            return np.zeros((A.shape[0], B.shape[1]))
        return _kernels.matmul_mod(A, B, self.p)

    def axpy(self, acc, c, M):
        return np.mod(acc + c * M, self.p)

    def mul_scalar(self, c, M):
        return np.mod(c * M, self.p)

    def neg(self, M):
        return np.mod(-M, self.p)

    def mul(self, x, y):
        return float(x * y % self.p)

    def inv_scalar(self, c):
        return float(pow(int(c), -1, self.p))

    def is_zero(self, A) -> bool:
        return not np.any(A)

    def stack(self, blocks, ncols):
        return np.vstack(blocks) if blocks else np.zeros((0, ncols))

    def kron(self, A, B):
        return np.mod(np.kron(A, B), self.p)

    def rref(self, A):
        return _kernels.rref_mod(A, self.p)

    def compress(self, A, target, rng):
        return _kernels.compress_rows(A, target, self.p, rng)

    def describe(self) -> dict:
        return {"backend": "modular", "prime": self.p, "v": self.v}


class ExactBackend:
    name = "exact"

    def __init__(self, v: Fraction):
        self.v = Fraction(v)
        self._zero = flint.fmpq(0)

    def scalar(self, x):
        x = Fraction(x)
        return flint.fmpq(x.numerator, x.denominator)

    def field(self, x: FieldElement):
        return self.scalar(x.specialize(self.v))

    def zeros(self, r, c):
        return np.full((r, c), self._zero, dtype=object)

    def eye(self, n):
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = flint.fmpq(1)
        return out

    def matmul(self, A, B):
        if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
            return self.zeros(A.shape[0], B.shape[1])
        return A.dot(B)

    def axpy(self, acc, c, M):
        return acc + M * c

    def mul_scalar(self, c, M):
        return M * c

    def neg(self, M):
        return -M

    def mul(self, x, y):
        return x * y

    def inv_scalar(self, c):
        return 1 / c

    def is_zero(self, A) -> bool:
        return all(x == 0 for x in A.flat)

    def stack(self, blocks, ncols):
        return np.vstack(blocks) if blocks else self.zeros(0, ncols)

    def kron(self, A, B):
        return np.kron(A, B)

    def rref(self, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return self.zeros(0, n), np.zeros(0, dtype=np.int64)
        M = flint.fmpq_mat(m, n, [x for x in A.flat])
        R, r = M.rref()
        out = self.zeros(r, n)
        piv = []
        for i in range(r):
            row = [R[i, j] for j in range(n)]
            out[i, :] = row
            piv.append(next(j for j in range(n) if row[j] != 0))
        return out, np.array(piv, dtype=np.int64)

    def compress(self, A, target, rng):
        return A

    def describe(self) -> dict:
        return {"backend": "exact", "v": str(self.v)}


def _eq(bk, A, B) -> bool:
    return bk.is_zero(A - B) if bk.name == "exact" else not np.any(np.mod(A - B, bk.p))


# ---------------------------------------------------------------- Fock module

@dataclass
class FockModule:
    ctype: CliffordType
    max_d2: int
    dims: dict
    act: dict                 # (m2, colour, source d2) -> matrix
    basis: dict               # d2 -> list of labels; label (m2, colour, index) or a zero-mode word
    backend: object
    data: RelationData
    consistency: dict = field(default_factory=dict)
    trials: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    zero_mode_scale: object = None

    @property
    def max_degree(self) -> Fraction:
        return Fraction(self.max_d2, 2)

    def word(self, d2: int, i: int) -> tuple:
        """Creation word (modes <= 0) producing the i-th basis vector of degree d2."""
        lab = self.basis[d2][i]
        if lab and lab[0] == "zero":
            return tuple(ModeGenerator(c, 0) for c in lab[1])
        if d2 == 0:
            return ()
        m2, c, j = lab
        return (ModeGenerator(c, Fraction(m2, 2)),) + self.word(d2 + m2, j)

    def apply(self, m2: int, c: int, X, src: int):
        """Action on a matrix of column vectors in degree src; None when the result is zero."""
        t = src - m2
        if t < 0 or X.shape[1] == 0:
            return None
        if t > self.max_d2:
            raise DegreeOverflowError(f"degree {Fraction(t, 2)} exceeds the module's range")
        if self.dims.get(t, 0) == 0 or self.dims.get(src, 0) == 0:
            return None
        M = self.act.get((m2, c, src))
        if M is None:
            raise KeyError((m2, c, src))
        return self.backend.matmul(M, X)

    def to_json(self) -> dict:
        return {"type": str(self.ctype), "module": self.ctype.module_choice,
                "max_degree": str(self.max_degree),
                "dims": [[str(Fraction(d, 2)), n] for d, n in sorted(self.dims.items())],
                "consistency": self.consistency, "trials": self.trials,
                **self.backend.describe()}


@dataclass
class FockVector:
    module: FockModule
    d2: int
    coeffs: object   # column of length dims[d2]

    @property
    def degree(self) -> Fraction:
        return Fraction(self.d2, 2)

    def is_zero(self) -> bool:
        return self.module.backend.is_zero(self.coeffs)


def vacuum(module: FockModule) -> FockVector:
    bk = module.backend
    v = bk.zeros(module.dims[0], 1)
    v[0, 0] = bk.scalar(1)
    return FockVector(module, 0, v)


def basis_vector(module: FockModule, d2: int, i: int) -> FockVector:
    bk = module.backend
    v = bk.zeros(module.dims[d2], 1)
    v[i, 0] = bk.scalar(1)
    return FockVector(module, d2, v)


def act(m: ModeGenerator, x: FockVector, module: FockModule | None = None) -> FockVector:
    module = module or x.module
    t = x.d2 - m.m2
    if t < 0:
        return FockVector(module, t, module.backend.zeros(0, 1))
    if t > module.max_d2:
        raise DegreeOverflowError(f"degree {Fraction(t, 2)} exceeds {module.max_degree}")
    out = module.apply(m.m2, m.color, x.coeffs, x.d2)
    if out is None:
        out = module.backend.zeros(module.dims.get(t, 0), 1)
    return FockVector(module, t, out)


def graded_dims(module: FockModule) -> list[tuple[Fraction, int]]:
    return [(Fraction(d, 2), n) for d, n in sorted(module.dims.items())]


def classical_oracle(t: CliffordType, max_degree) -> list[tuple[Fraction, int]]:
    """Wedge-type count: prod (1 + x^m)^N over positive modes, times 2^floor(N/2) on Z."""
    N = cartan(t.kind).N
    D = _d2(max_degree)
    coeffs = [0] * (D + 1)
    coeffs[0] = 1
    first = 1 if t.half else 2
    for m2 in range(first, D + 1, 2):
        for _ in range(N):
            for d in range(D, m2 - 1, -1):
                coeffs[d] += coeffs[d - m2]
    mult = 1 if t.half else 2 ** (N // 2)
    return [(Fraction(d, 2), mult * coeffs[d]) for d in t.degrees2(D)]


# ---------------------------------------------------------------- builder

class _Builder:
    def __init__(self, ctype: CliffordType, max_d2: int, bk, data: RelationData, rng, word_length=None):
        self.t = ctype
        self.bk = bk
        self.data = data
        self.rng = rng
        self.J = cartan(ctype.kind).index_set
        self.word_length = word_length
        self.m = FockModule(ctype, max_d2, {}, {}, {}, bk, data)

    # helpers
    def creation_modes(self, d2):
        start = -1 if self.t.half else -2
        return [m2 for m2 in range(start, -d2 - 1, -2) if self.m.dims.get(d2 + m2, 0) > 0]

    def annihilation_modes(self, d2):
        start = 1 if self.t.half else 2
        return list(range(start, d2 + 1, 2))

    def blocks(self, d2):
        out, off = [], 0
        for m2 in self.creation_modes(d2):
            e2 = d2 + m2
            for c in self.J:
                out.append((m2, c, e2, off, self.m.dims[e2]))
                off += self.m.dims[e2]
        return out, off

    def ap(self, m2, c, X, src):
        return self.m.apply(m2, c, X, src)

    def two(self, outer, inner, X, src):
        w = self.ap(inner[0], inner[1], X, src)
        if w is None:
            return None
        return self.ap(outer[0], outer[1], w, src - inner[0])

    def _word_quotient(self, data, zero_fixed: bool, L: int):
        J = self.J
        bk = self.bk

        def norm(w):
            while zero_fixed and w and w[-1] == 0:
                w = w[:-1]
            if w and w[-1] < 0:
                return None
            return w

        words = [w for l in range(L + 1) for w in itertools.product(J, repeat=l) if norm(w) == w]
        words.sort(key=lambda w: -len(w))       # pivots prefer long words
        ix = {w: i for i, w in enumerate(words)}
        n = len(words)
        g0 = data.f[0]
        H0 = data.H[0]
        one = bk.scalar(1)
        rows = []
        suffixes = [w for w in words]
        for u in suffixes:
            for lp in range(0, L - 1 - len(u)):
                for p in itertools.product(J, repeat=lp):
                    for al in J:
                        for be in J:
                            row = {}

                            def add(w, c):
                                w = norm(w)
                                if w is None:
                                    return
                                row[ix[w]] = row.get(ix[w], 0) + c
                            add(p + (al, be) + u, g0)
                            for (dl, ga), h in H0.get((al, be), {}).items():
                                add(p + (ga, dl) + u, -h)
                            fv = data.delta(al, be, 0, 0)
                            if fv is not None:
                                add(p + u, -fv)
                            rows.append(row)
        A = bk.zeros(len(rows), n)
        for r, row in enumerate(rows):
            for c, x in row.items():
                A[r, c] = x
        if bk.name == "modular":
            A = np.mod(A, bk.p)
        A = bk.compress(A, n + 16, self.rng)
        R, piv = bk.rref(A)
        pivset = set(int(c) for c in piv)
        free = [c for c in range(n) if c not in pivset]
        prow = {int(c): r for r, c in enumerate(piv)}

        def proj(w):
            w = norm(w)
            v = bk.zeros(1, len(free))
            if w is None:
                return v
            c = ix[w]
            if c in prow:
                v[0, :] = bk.neg(R[prow[c], free])
            else:
                v[0, free.index(c)] = one
            return v
        return words, proj, free

    def _zero_modes(self):
        """Degree-zero module of the zero modes: a quotient of words acting on the vacuum."""
        bk, J = self.bk, self.J
        n = self.t.kind.rank
        L = self.word_length or n + 2
        data = self.data
        has0 = 0 in J
        if has0:
            words, proj, free = self._word_quotient(data, False, L)
            a, b = proj((0, 0)), proj(())
            nz = [k for k in range(b.shape[1]) if b[0, k] != 0]
            if not nz:
                raise InconsistentQuotientError("vacuum vanishes in the zero-mode quotient")
            c2 = a[0, nz[0]] * bk.inv_scalar(b[0, nz[0]])
            if not _eq(bk, a, bk.mul_scalar(c2, b)):
                raise InconsistentQuotientError("Psi_0(0)^2 does not act by a scalar on the vacuum")
            if c2 == 0:
                raise InconsistentQuotientError("Psi_0(0)^2 kills the vacuum")
            data = data.scale_F(bk.inv_scalar(c2))
            self.data = data
            self.m.data = data
            self.m.zero_mode_scale = c2
        words, proj, free = self._word_quotient(data, has0, L)
        by_len = {}
        for l in range(L + 1):
            vecs = [proj(w) for w in words if len(w) <= l]
            M = bk.stack(vecs, len(free))
            by_len[l] = len(bk.rref(M)[1]) if len(vecs) else 0
        l0 = next((l for l in range(L - 1) if by_len[l] == by_len[l + 1]), None)
        if l0 is None:
            raise InconsistentQuotientError(f"zero-mode quotient not stable up to word length {L}")
        basis, rows = [], []
        for w in sorted((w for w in words if len(w) <= l0), key=lambda w: (len(w), w)):
            cand = rows + [proj(w)]
            if len(bk.rref(bk.stack(cand, len(free)))[1]) == len(cand):
                basis, rows = basis + [w], cand
        Bm = bk.stack(rows, len(free))
        k = len(basis)
        _, cols = bk.rref(Bm)
        cols = [int(c) for c in cols]
        sq = Bm[:, cols]
        inv = bk.rref(np.hstack([sq, bk.eye(k)]))[0][:, k:]

        def coords(T):
            X = bk.matmul(T[:, cols], inv)
            if not _eq(bk, bk.matmul(X, Bm), T):
                raise InconsistentQuotientError("zero-mode action leaves the stable span")
            return X
        self.m.dims[0] = k
        self.m.basis[0] = [("zero", w) for w in basis]
        for c in J:
            T = bk.stack([proj((c,) + w) for w in basis], len(free))
            self.m.act[(0, c, 0)] = coords(T).T.copy()
        self.m.consistency["zero_mode_word_length"] = {"L": L, "stable_at": l0,
                                                      "span_by_length": by_len}

    # generator-space evaluation at the degree being built
    def eval_gen(self, terms, X, src, d2, blocks, G, Zgen):
        bk = self.bk
        acc = bk.zeros(G, X.shape[1])
        index = {(m2, c): (off, size) for m2, c, _, off, size in blocks}
        for coef, outer, inner in terms:
            x2, cx = outer
            if x2 < 0:
                w = self.ap(inner[0], inner[1], X, src)
                if w is None:
                    continue
                if (x2, cx) not in index:
                    continue
                off, size = index[(x2, cx)]
                acc[off:off + size] = bk.axpy(acc[off:off + size], coef, w)
            elif x2 == 0:
                y2, cy = inner
                if y2 >= 0:
                    raise InconsistentQuotientError("zero-mode term without a creation partner")
                if (y2, cy) not in index:
                    continue
                off, size = index[(y2, cy)]
                Wg = bk.zeros(G, X.shape[1])
                Wg[off:off + size] = X
                acc = bk.axpy(acc, coef, bk.matmul(Zgen[cx], Wg))
            else:
                raise InconsistentQuotientError("relation leaves the degree being built")
        return acc

    def eval_on_gens(self, terms, d2, blocks, G, Zgen, Ag):
        """A degree-preserving relation (modes summing to 0) applied to every generator."""
        bk = self.bk
        acc = bk.zeros(G, G)
        index = {(m2, c): (off, size) for m2, c, _, off, size in blocks}
        for coef, outer, inner in terms:
            y2, cy = inner
            x2, cx = outer
            if y2 > 0:
                A = Ag.get((y2, cy))
                if A is None:
                    continue
                if (x2, cx) not in index:
                    continue
                off, size = index[(x2, cx)]
                acc[off:off + size] = bk.axpy(acc[off:off + size], coef, A)
            elif y2 == 0:
                acc = bk.axpy(acc, coef, bk.matmul(Zgen[cx], Zgen[cy]))
            else:
                # inner creation out of degree d2 leaves the built range; its outer partner annihilates
                continue
        return acc

    def build_degree(self, d2):
        bk, data, J = self.bk, self.data, self.J
        blocks, G = self.blocks(d2)
        t0 = time.time()
        if G == 0:
            self.m.dims[d2] = 0
            self.m.basis[d2] = []
            return
        # zero modes on generators (Z lattice)
        Zgen = {}
        if not self.t.half:
            for ga in J:
                Z = bk.zeros(G, G)
                for m2, be, e2, off, size in blocks:
                    terms = [tm for tm in data.terms(ga, be, 0, m2)
                             if not (tm[1] == (0, ga) and tm[2] == (m2, be))]
                    lead = data.f[0]
                    X = bk.eye(size)
                    col = self.eval_gen(terms, X, e2, d2, blocks, G, None)
                    Z[:, off:off + size] = bk.mul_scalar(bk.inv_scalar(lead), bk.neg(col))
                Zgen[ga] = Z
        # annihilators on generators
        Ag = {}
        for a2 in self.annihilation_modes(d2):
            t = d2 - a2
            for al in J:
                A = bk.zeros(self.m.dims.get(t, 0), G)
                if A.shape[0]:
                    for m2, be, e2, off, size in blocks:
                        X = bk.eye(size)
                        acc = bk.zeros(A.shape[0], size)
                        for coef, outer, inner in data.terms(al, be, a2, m2):
                            if outer == (a2, al) and inner == (m2, be):
                                continue
                            w = self.two(outer, inner, X, e2)
                            if w is not None:
                                acc = bk.axpy(acc, bk.neg(coef), w)
                        dl = data.delta(al, be, a2, m2)
                        if dl is not None and t == e2:
                            acc = bk.axpy(acc, dl, X)
                        A[:, off:off + size] = bk.mul_scalar(bk.inv_scalar(data.f[0]), acc)
                Ag[(a2, al)] = A
        # relation rows
        rows = []
        cm = [m2 for m2 in range(-1 if self.t.half else -2, -d2 - 1, -2)]
        pairs = [(a2, b2) for a2 in cm + ([] if self.t.half else [0])
                 for b2 in cm + ([] if self.t.half else [0])
                 if not (a2 == 0 and b2 == 0) and d2 + a2 + b2 >= 0]
        for a2, b2 in pairs:
            e2 = d2 + a2 + b2
            if self.m.dims.get(e2, 0) == 0:
                continue
            X = bk.eye(self.m.dims[e2])
            for al in J:
                for be in J:
                    Y = self.eval_gen(data.terms(al, be, a2, b2), X, e2, d2, blocks, G, Zgen)
                    rows.append(Y.T)
        if not self.t.half:
            I = bk.eye(G)
            for al in J:
                for be in J:
                    Y = self.eval_on_gens(data.terms(al, be, 0, 0), d2, blocks, G, Zgen, Ag)
                    dl = data.delta(al, be, 0, 0)
                    if dl is not None:
                        Y = bk.axpy(Y, bk.neg(dl), I)
                    rows.append(Y.T)
        A = bk.stack(rows, G)
        nrows = A.shape[0]
        A = bk.compress(A, G + 16, self.rng)
        R, piv = bk.rref(A)
        piv = [int(c) for c in piv]
        pivset = set(piv)
        free = [c for c in range(G) if c not in pivset]
        dim = len(free)
        Pi = bk.zeros(dim, G)
        one = bk.scalar(1)
        for k, c in enumerate(free):
            Pi[k, c] = one
        if piv:
            Pi[:, piv] = bk.neg(R[:, free]).T
        self.m.dims[d2] = dim
        labels = []
        for m2, c, e2, off, size in blocks:
            labels += [(m2, c, i) for i in range(size)]
            self.m.act[(m2, c, e2)] = Pi[:, off:off + size].copy()
        self.m.basis[d2] = [labels[c] for c in free]
        Rt = R.T if len(piv) else bk.zeros(G, 0)
        bad = []
        for (a2, al), A_ in Ag.items():
            self.m.act[(a2, al, d2)] = A_[:, free].copy()
            if A_.shape[0] and len(piv) and not bk.is_zero(bk.matmul(A_, Rt)):
                bad.append(f"Psi_{al}({Fraction(a2, 2)})")
        for ga, Z in Zgen.items():
            self.m.act[(0, ga, d2)] = bk.matmul(Pi, Z[:, free])
            if len(piv) and not bk.is_zero(bk.matmul(Pi, bk.matmul(Z, Rt))):
                bad.append(f"Psi_{ga}(0)")
        self.m.consistency[str(Fraction(d2, 2))] = {
            "generators": G, "relations": nrows, "rank": len(piv), "dim": dim,
            "ill_defined_actions": bad}
        self.m.timings[str(Fraction(d2, 2))] = round(time.time() - t0, 3)
        log.info("degree %s: generators %d, rank %d, dim %d", Fraction(d2, 2), G, len(piv), dim)

    def run(self) -> FockModule:
        if self.t.half:
            self.m.dims[0] = 1
            self.m.basis[0] = [()]
        else:
            self._zero_modes()
        for d2 in self.t.degrees2(self.m.max_d2)[1:]:
            self.build_degree(d2)
        return self.m


def _trial_backends(backend: str, trials: int, seed: int, exact_v):
    if backend == "exact":
        return [ExactBackend(Fraction(exact_v))]
    if backend != "modular":
        raise CliffordError(f"unknown backend {backend!r}")
    rng = np.random.default_rng(seed)
    return [ModularBackend(PRIMES[i % len(PRIMES)], int(rng.integers(1000, PRIMES[i % len(PRIMES)] - 1)))
            for i in range(trials)]


def _cache_path(ctype, max_d2, backend, trials, seed, exact_v, cache_dir):
    d = cache_dir or os.environ.get(CACHE_ENV)
    if not d:
        return None
    key = f"{ctype.kind}_{ctype.lattice}_{max_d2}_{backend}_{trials}_{seed}_{exact_v}_{ledger_hash()}"
    return Path(d) / f"fock_{key.replace('+', 'p').replace('/', 'o')}.pkl"


def _mutated(sym: RelationData, mutate: str | None) -> RelationData:
    if mutate is None:
        return sym
    if mutate == "flip-f1":
        return RelationData(sym.ctype, [sym.f[0], -sym.f[1]] + sym.f[2:], sym.H, sym.Fvec,
                            sym.xi_pow, sym.zero, sym.mul)
    raise CliffordError(f"unknown mutation {mutate!r}")


def build_fock(t: CliffordType, max_degree, backend: str = "modular", trials: int = 2, seed: int = 0,
               exact_v=Fraction(5, 3), cache_dir=None, word_length=None,
               mutate: str | None = None) -> FockModule:
    """Degree-by-degree Fock module; modular trials keep the run with the largest ranks.

    ``mutate="flip-f1"`` negates the first exchange coefficient (fault injection).
    """
    max_d2 = _d2(max_degree)
    if max_d2 < 0:
        raise CliffordError("max_degree must be non-negative")
    path = None if mutate else _cache_path(t, max_d2, backend, trials, seed, exact_v, cache_dir)
    if path is not None and path.exists():
        with open(path, "rb") as fh:
            blob = pickle.load(fh)
        if blob.get("ledger") == ledger_hash():
            return blob["module"]
    K = max_d2 + 2
    sym = _mutated(relation_data(t, K), mutate)
    results = []
    for bk in _trial_backends(backend, trials, seed, exact_v):
        try:
            data = sym.map(bk.field, bk.mul)
        except ZeroDivisionError:
            continue
        rng = np.random.default_rng(seed + 7919 * len(results))
        mod = _Builder(t, max_d2, bk, data, rng, word_length).run()
        results.append(mod)
    if not results:
        raise CliffordError("every trial hit a bad specialization")
    key = lambda m: [m.dims[d] for d in sorted(m.dims)]
    best = min(results, key=key)
    best.trials = [{**m.backend.describe(), "dims": key(m)} for m in results]
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            pickle.dump({"ledger": ledger_hash(), "module": best}, fh)
    return best


# ---------------------------------------------------------------- verification

@dataclass
class VerifyReport:
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"checked": self.checked, "failures": self.failures[:50],
                "n_failures": len(self.failures), "ok": self.ok}


def verify_relations(module: FockModule, max_d2: int | None = None) -> VerifyReport:
    """Every relation applied to every basis vector whose terms stay inside the built range."""
    D = module.max_d2
    top = D if max_d2 is None else min(max_d2, D)
    t = module.ctype
    bk, data = module.backend, module.data
    J = cartan(t.kind).index_set
    lattice = [m for m in range(-D - 1, D + 2) if m % 2 == t.parity]
    checked, fails = 0, []
    for e2 in t.degrees2(top):
        n = module.dims.get(e2, 0)
        if n == 0:
            continue
        X = bk.eye(n)
        for a2 in lattice:
            for b2 in lattice:
                tgt = e2 - a2 - b2
                if not 0 <= tgt <= top or e2 - min(a2, b2) > D:
                    continue
                need = (e2 - min(a2, b2)) // 2 + 1
                if need > data.K:
                    raise CutoffError("relation data too short for verification")
                for al in J:
                    for be in J:
                        acc = bk.zeros(module.dims.get(tgt, 0), n)
                        for coef, outer, inner in data.terms(al, be, a2, b2):
                            w = module.apply(inner[0], inner[1], X, e2)
                            if w is None:
                                continue
                            w = module.apply(outer[0], outer[1], w, e2 - inner[0])
                            if w is not None:
                                acc = bk.axpy(acc, coef, w)
                        dl = data.delta(al, be, a2, b2)
                        if dl is not None:
                            acc = bk.axpy(acc, bk.neg(dl), X)
                        checked += 1
                        if acc.size and not bk.is_zero(acc):
                            fails.append([al, be, str(Fraction(a2, 2)), str(Fraction(b2, 2)),
                                          str(Fraction(e2, 2))])
    return VerifyReport(checked, fails)


def compare_with_oracle(module: FockModule) -> list[dict]:
    oracle = dict(classical_oracle(module.ctype, module.max_degree))
    return [{"degree": str(d), "fock": n, "oracle": oracle.get(d), "equal": n == oracle.get(d)}
            for d, n in graded_dims(module)]

"""Small exact linear algebra helpers over any field type (Fraction, FieldElement, flint)."""
from __future__ import annotations

from typing import Sequence


class SMat:
    """Sparse square-or-rectangular matrix stored as row -> {col: value}."""

    __slots__ = ("rows",)

    def __init__(self, rows: dict | None = None):
        self.rows = {}
        for r, d in (rows or {}).items():
            d = {c: x for c, x in d.items() if x != 0}
            if d:
                self.rows[r] = d

    @classmethod
    def from_entries(cls, entries: dict) -> "SMat":
        rows: dict = {}
        for (r, c), x in entries.items():
            rows.setdefault(r, {})[c] = x
        return cls(rows)

    @classmethod
    def identity(cls, n: int, one=1) -> "SMat":
        return cls({i: {i: one} for i in range(n)})

    def entries(self):
        for r, d in self.rows.items():
            for c, x in d.items():
                yield (r, c), x

    def __matmul__(self, other: "SMat") -> "SMat":
        out: dict = {}
        for r, d in self.rows.items():
            acc: dict = {}
            for k, x in d.items():
                row = other.rows.get(k)
                if not row:
                    continue
                for c, y in row.items():
                    t = x * y
                    acc[c] = acc[c] + t if c in acc else t
            if acc:
                out[r] = acc
        return SMat(out)

    def __add__(self, other: "SMat") -> "SMat":
        out = {r: dict(d) for r, d in self.rows.items()}
        for r, d in other.rows.items():
            tgt = out.setdefault(r, {})
            for c, x in d.items():
                tgt[c] = tgt[c] + x if c in tgt else x
        return SMat(out)

    def __neg__(self):
        return SMat({r: {c: -x for c, x in d.items()} for r, d in self.rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "SMat":
        return SMat({r: {c: x * s for c, x in d.items()} for r, d in self.rows.items()})

    def kron(self, other: "SMat", dim_other: int) -> "SMat":
        out: dict = {}
        for r, d in self.rows.items():
            for r2, d2 in other.rows.items():
                row = out.setdefault(r * dim_other + r2, {})
                for c, x in d.items():
                    for c2, y in d2.items():
                        row[c * dim_other + c2] = x * y
        return SMat(out)

    def permute(self, perm: Sequence[int]) -> "SMat":
        """Conjugate by the permutation matrix P with P e_i = e_perm[i]."""
        return SMat({perm[r]: {perm[c]: x for c, x in d.items()} for r, d in self.rows.items()})

    def is_zero(self) -> bool:
        return not self.rows

    def nnz(self) -> int:
        return sum(len(d) for d in self.rows.values())

    def max_abs(self):
        vals = [abs(x) for _, x in self.entries()]
        return max(vals) if vals else 0


def rref(rows: list[list], ncols: int):
    """Reduced row echelon form over an exact field; returns (rows, pivots)."""
    A = [list(r) for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], piv


def nullspace(rows: list[list], ncols: int, zero=0, one=1) -> list[list]:
    R, piv = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(piv):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis

"""Spinor fields, their L-operator bilinears and the L-operator exchange check.

Phi_j(z) = sum_a Psi_j(a) z^-a,  Phi*_i(z) = q^{bar(-i)} Psi_-i(z / xi)
L_ij(z)  = Phi_j(z q^2) Phi*_i(z)

The bilinear carries the scalar factor 1/F(q^2 xi), which has a pole for some types.
``build_L`` therefore returns the regularised product F(q^2 xi) L(z): each coefficient is a
finite normal-ordered sum plus a geometric vacuum tail.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clifford import FockModule
from .rmatrix import build_rbar
from .scalar import FieldElement
from .vecrep import cartan, xi_exponent

MUTATIONS = (None, "drop-shift")


class SpinorError(ValueError):
    pass


@dataclass
class OperatorSeries:
    """terms[(row, col)][(s2, src_d2)]: coefficient of z^(-s) mapping degree src to src - s."""

    N: int
    index_set: list
    terms: dict = field(default_factory=dict)

    def get(self, i, j, s2, d2):
        return self.terms.get((i, j), {}).get((s2, d2))

    def nonzero(self, bk) -> int:
        return sum(1 for blk in self.terms.values() for M in blk.values()
                   if M.size and not bk.is_zero(M))

    def to_json(self, bk=None) -> dict:
        out = []
        for (i, j), blk in sorted(self.terms.items()):
            for (s2, d2), M in sorted(blk.items()):
                nz = None if bk is None else (M.size > 0 and not bk.is_zero(M))
                out.append({"row": i, "col": j, "z_power": -s2 // 2,
                            "source_degree": str(Fraction(d2, 2)), "shape": list(M.shape),
                            "nonzero": nz})
        return {"N": self.N, "entries": out}


def _vpow(bk, e: int):
    return bk.field(FieldElement.v(e))


def phi_series(module: FockModule, j: int) -> dict:
    """(m2, src_d2) -> action of Psi_j(m) on degree src; coefficient of z^-m."""
    out = {}
    D = module.max_d2
    for d2, n in module.dims.items():
        if n == 0:
            continue
        for m2 in range(-D - 1, D + 2):
            if m2 % 2 != module.ctype.parity or not 0 <= d2 - m2 <= D:
                continue
            M = module.apply(m2, j, module.backend.eye(n), d2)
            if M is not None:
                out[(m2, d2)] = M
    return out


def phi_star_series(module: FockModule, i: int) -> dict:
    """Same layout for Phi*_i(z) = q^{bar(-i)} Psi_-i(z / xi)."""
    bk = module.backend
    cd = cartan(module.ctype.kind)
    xe = xi_exponent(module.ctype.kind)
    base = phi_series(module, -i)
    # coefficient of z^-m picks up q^{bar(-i)} xi^m = v^{2 bar(-i) + xe m2}
    return {(m2, d2): bk.mul_scalar(_vpow(bk, 2 * cd.bar_index(-i) + xe * m2), M)
            for (m2, d2), M in base.items()}


def _lattice_above(parity: int, d2: int) -> int:
    a = d2 + 1
    return a if a % 2 == parity else a + 1


def build_L(module: FockModule, mutate: str | None = None) -> OperatorSeries:
    """Regularised F(q^2 xi) L_ij(z) on every degree of the module window."""
    if mutate not in MUTATIONS:
        raise SpinorError(f"unknown mutation {mutate!r}")
    t, bk, data = module.ctype, module.backend, module.data
    cd = cartan(t.kind)
    J, D = cd.index_set, module.max_d2
    xe = xi_exponent(t.kind)
    xexp = xe if mutate == "drop-shift" else xe + 2      # x = q^2 xi as a power of q
    ratio_inv = bk.inv_scalar(bk.scalar(1) - _vpow(bk, -(xe + xexp)))  # 1 / (1 - (xi x)^-1)
    out = OperatorSeries(cd.N, list(J))
    for d2 in t.degrees2(D):
        n = module.dims.get(d2, 0)
        if n == 0:
            continue
        X = bk.eye(n)
        for e2 in t.degrees2(D):
            m = module.dims.get(e2, 0)
            s2 = d2 - e2
            if m == 0 or s2 % 2:
                continue
            for i in J:
                ci = _vpow(bk, 2 * cd.bar_index(-i) + xe * s2)   # q^{bar(-i)} xi^s
                for j in J:
                    acc = bk.zeros(m, n)
                    for a2 in range(-e2, d2 + 1):
                        if a2 % 2 != t.parity:
                            continue
                        b2 = s2 - a2
                        use_f = e2 + a2 <= d2 - a2
                        blk = _relation_side(module, data, j, -i, a2, b2, X, d2, m, use_f)
                        if blk is not None:
                            acc = bk.axpy(acc, _vpow(bk, -xexp * a2), blk)
                    if s2 == 0:
                        a1 = _lattice_above(t.parity, d2)
                        dl = data.delta(j, -i, a1, -a1)
                        if dl is not None:
                            c = bk.mul(bk.mul(dl, _vpow(bk, -xexp * a1)), ratio_inv)
                            acc = bk.axpy(acc, c, X)
                    out.terms.setdefault((i, j), {})[(s2, d2)] = bk.mul_scalar(ci, acc)
    return out


def _relation_side(module, data, al, be, a2, b2, X, d2, m, use_f):
    """sum_k f_k Psi_al(a-k) Psi_be(b+k) on X, or the same through the exchanged side."""
    bk = module.backend
    if use_f:
        pairs = [(data.f[k], (a2 - 2 * k, al), (b2 + 2 * k, be)) for k in range(data.K)]
    else:
        pairs = [(h, (b2 - 2 * k, ga), (a2 + 2 * k, dl))
                 for k in range(data.K) for (dl, ga), h in data.H[k].get((al, be), {}).items()]
    acc, hit = bk.zeros(m, X.shape[1]), False
    for coef, outer, inner in pairs:
        w = module.apply(inner[0], inner[1], X, d2)
        if w is None:
            continue
        w = module.apply(outer[0], outer[1], w, d2 - inner[0])
        if w is None:
            continue
        acc = bk.axpy(acc, coef, w)
        hit = True
    if not use_f:
        dl = data.delta(al, be, a2, b2)
        if dl is not None:
            acc = bk.axpy(acc, dl, X)
            hit = True
    return acc if hit else None


# ---------------------------------------------------------------- exchange relation

def _series_inverse(bk, den: list, order: int) -> list:
    one = bk.eye(1)
    inv0 = bk.inv_scalar(den[0])
    out = [inv0]
    for n in range(1, order + 1):
        acc = bk.zeros(1, 1)
        for k in range(1, min(n, len(den) - 1) + 1):
            acc = bk.axpy(acc, bk.mul(den[k], out[n - k]), one)
        out.append(bk.mul(bk.neg(acc[0, 0]), inv0))
    return out


def rbar_expansion(kind, bk, scale_q: int, at_infinity: bool, swap: bool, order: int):
    """R(c y) (or R(c / y)) as (offset, [coefficient of y^(offset + k)]) with c = q^scale_q.

    ``swap`` conjugates by the flip of the two tensor slots.
    """
    R = build_rbar(kind)
    N = cartan(kind).N
    sgn = -1 if at_infinity else 1

    def ypoly(lp):
        return {sgn * e: c * FieldElement.q(scale_q * e) for e, c in lp.terms.items()}

    den = ypoly(R.denominator)
    num = {rc: ypoly(lp) for rc, lp in R.numerator.entries.items()}
    m0 = min(den)
    dser = [bk.field(den.get(m0 + k, FieldElement(0))) for k in range(max(den) - m0 + 1)]
    inv = _series_inverse(bk, dser, order)
    lo = min(e for p in num.values() for e in p) - m0
    hi = max(e for p in num.values() for e in p) - m0
    nums = {}
    for (r, c), p in num.items():
        for e, x in p.items():
            M = nums.setdefault(e - m0, bk.zeros(N * N, N * N))
            M[r, c] = bk.field(x)
    perm = np.array([(r % N) * N + r // N for r in range(N * N)])
    out = []
    for k in range(order + 1):
        acc = bk.zeros(N * N, N * N)
        for t in range(lo, min(hi, lo + k) + 1):
            if t in nums and k - (t - lo) <= order:
                acc = bk.axpy(acc, inv[k - (t - lo)], nums[t])
        out.append(acc[np.ix_(perm, perm)] if swap else acc)
    return lo, out


@dataclass
class ExchangeReport:
    window: str
    series_order: int
    fock_degree: str
    fitted: list
    consistent: bool
    vacuum_consistent: bool
    equations: int
    residual_nonzero: int
    window_sensitive: int
    vector_independent: bool
    per_vector: list
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


class _Exchange:
    def __init__(self, module: FockModule, L: OperatorSeries, order: int):
        self.m, self.L, self.bk = module, L, module.backend
        kind = module.ctype.kind
        self.cd = cartan(kind)
        self.N = self.cd.N
        self.R_lhs = rbar_expansion(kind, self.bk, -2, True, False, order)    # R(q^-2 / y)
        self.R21_lhs = rbar_expansion(kind, self.bk, 0, False, True, order)   # R21(y)
        self.R_rhs = rbar_expansion(kind, self.bk, 0, True, False, order)     # R(1 / y)
        self.R21_rhs = rbar_expansion(kind, self.bk, -2, False, True, order)  # R21(q^-2 y)
        self.order = order
        self._ops: dict = {}

    def dim(self, d2):
        return self.m.dims.get(d2, 0) if 0 <= d2 <= self.m.max_d2 else 0

    def lbig(self, s2: int, d2: int):
        """Blocks L_ij: degree d2 -> d2 - s2 as one (N m) x (N n) matrix, None when empty."""
        key = (s2, d2)
        if key not in self._ops:
            n, m = self.dim(d2), self.dim(d2 - s2)
            out = None
            if n and m:
                pos, N = self.cd.position, self.N
                out = self.bk.zeros(N * m, N * n)
                for (i, j), blk in self.L.terms.items():
                    M = blk.get((s2, d2))
                    if M is not None:
                        out[pos(i) * m:(pos(i) + 1) * m, pos(j) * n:(pos(j) + 1) * n] = M
            self._ops[key] = out
        return self._ops[key]

    def apply_l(self, slot: int, s2: int, d2: int, X):
        """L in tensor slot 1 or 2; X has rows (a, b, fock) at degree d2."""
        Lb = self.lbig(s2, d2)
        if Lb is None:
            return None
        N, n, m, C = self.N, self.dim(d2), self.dim(d2 - s2), X.shape[1]
        T = X.reshape(N, N, n, C)
        if slot == 1:
            Y = T.transpose(0, 2, 1, 3).reshape(N * n, N * C)
            Z = self.bk.matmul(Lb, Y).reshape(N, m, N, C).transpose(0, 2, 1, 3)
        else:
            Y = T.transpose(1, 2, 0, 3).reshape(N * n, N * C)
            Z = self.bk.matmul(Lb, Y).reshape(N, m, N, C).transpose(2, 0, 1, 3)
        return np.ascontiguousarray(Z).reshape(N * N * m, C)

    def apply_r(self, R, X):
        C = X.shape[1]
        n = X.shape[0] // (self.N ** 2)
        return self.bk.matmul(R, X.reshape(self.N ** 2, n * C)).reshape(-1, C)

    def _pairs(self, exp1, exp2, K):
        (o1, s1), (o2, s2) = exp1, exp2
        for k1 in range(o1, o1 + len(s1)):
            k2 = K - k1
            if o2 <= k2 < o2 + len(s2):
                yield s1[k1 - o1], s2[k2 - o2]

    def lhs(self, d2, A, B):
        """z^A w^B coefficient of L1(z) R(q^-2/y) L2(w) R21(y) on degree d2."""
        bk = self.bk
        e2 = d2 + 2 * (A + B)
        X0 = bk.eye(self.N ** 2 * self.dim(d2))
        acc = bk.zeros(self.N ** 2 * self.dim(e2), X0.shape[1])
        Kmin = self.R_lhs[0] + self.R21_lhs[0]
        for K in range(Kmin, Kmin + self.order + 1):
            s2a, s2b = 2 * (K - B), 2 * (-A - K)
            d1 = d2 - s2a
            if self.lbig(s2a, d2) is None or self.lbig(s2b, d1) is None:
                continue
            for Ra, Rb in self._pairs(self.R_lhs, self.R21_lhs, K):
                X = self.apply_l(2, s2a, d2, self.apply_r(Rb, X0))
                X = self.apply_l(1, s2b, d1, self.apply_r(Ra, X))
                acc = bk.axpy(acc, bk.scalar(1), X)
        return acc

    def rhs(self, d2, A, B, cap=None):
        """z^A w^B coefficient of R(1/y) L2(w) R21(q^-2 y) L1(z), truncated at degree ``cap``."""
        cap = self.m.max_d2 if cap is None else cap
        bk = self.bk
        e2 = d2 + 2 * (A + B)
        X0 = bk.eye(self.N ** 2 * self.dim(d2))
        acc = bk.zeros(self.N ** 2 * self.dim(e2), X0.shape[1])
        Kmin = self.R_rhs[0] + self.R21_rhs[0]
        for K in range(Kmin, Kmin + self.order + 1):
            s2a, s2b = 2 * (-A - K), 2 * (K - B)
            d1 = d2 - s2a
            if d1 > cap:
                break
            if self.lbig(s2a, d2) is None or self.lbig(s2b, d1) is None:
                continue
            L1X = self.apply_l(1, s2a, d2, X0)
            for Rc, Rd in self._pairs(self.R_rhs, self.R21_rhs, K):
                X = self.apply_l(2, s2b, d1, self.apply_r(Rd, L1X))
                acc = bk.axpy(acc, bk.scalar(1), self.apply_r(Rc, X))
        return acc


def _out(bk, x):
    return str(x) if bk.name == "exact" else int(x)


def _same(bk, A, B) -> bool:
    D = A - B
    return not (np.any(D != 0) if bk.name == "exact" else np.any(np.mod(D, bk.p)))


def _flat(bk, M):
    return M.reshape(-1, 1)


def _solve(bk, cols: list, rhs, rng):
    """Solve sum_k phi_k cols[k] = rhs; returns (phi, consistent).

    When inconsistent, phi solves the rows picked by an independent subset of the coefficient
    rows, so the reported residual measures the failure against a genuine fit.
    """
    A = np.hstack(cols + [rhs])
    if bk.name == "modular" and A.shape[0] > 4 * A.shape[1]:
        P = rng.integers(0, bk.p, size=(4 * A.shape[1], A.shape[0])).astype(float)
        A = bk.matmul(P, A)
    k = len(cols)
    _, piv = bk.rref(A)
    consistent = k not in set(int(x) for x in piv)
    if not consistent:
        _, rows = bk.rref(A[:, :k].T.copy())
        A = A[[int(r) for r in rows]]
    R, piv = bk.rref(A)
    phi = [bk.scalar(0)] * k
    for row, c in enumerate(piv):
        if c < k:
            phi[int(c)] = R[row, k]
    return phi, consistent


def check_L_exchange(module: FockModule, series_order: int = 1, fock_degree=1,
                     L: OperatorSeries | None = None, seed: int = 0) -> ExchangeReport:
    """Fit one scalar series phi(w/z) with LHS = phi RHS on every z^A w^B, |A|, |B| <= series_order."""
    bk = module.backend
    L = L if L is not None else build_L(module)
    T = series_order
    top = min(int(2 * Fraction(fock_degree)), module.max_d2)
    ex = _Exchange(module, L, module.max_d2 // 2 + 2 * T + 4)
    rng = np.random.default_rng(seed)
    P = 2 * T
    eqs, keys = [], []          # (d2, lhs, [rhs shifted by k])
    for d2 in module.ctype.degrees2(top):
        if not ex.dim(d2):
            continue
        for A in range(-T, T + 1):
            for B in range(-T, T + 1):
                if not ex.dim(d2 + 2 * (A + B)):
                    continue
                keys.append((d2, A, B))
                eqs.append((d2, ex.lhs(d2, A, B), [ex.rhs(d2, A + k, B - k) for k in range(P + 1)]))
    if not eqs:
        raise SpinorError("no equations in range")
    # right-hand coefficients are infinite sums; count those still moving at the window edge
    lower = module.max_d2 - 2
    sensitive = 0
    sensitive = sum(1 for (d2, A, B), (_, _, rhs) in zip(keys, eqs)
                    if not _same(bk, rhs[0], ex.rhs(d2, A, B, lower)))

    def fit(sel, idx=None):
        pick = (lambda M, d2: M) if idx is None else \
            (lambda M, d2: M[:, [c * ex.dim(d2) + idx for c in range(ex.N ** 2)]])
        cols = [np.vstack([_flat(bk, pick(e[2][k], e[0])) for e in sel]) for k in range(P + 1)]
        return _solve(bk, cols, np.vstack([_flat(bk, pick(e[1], e[0])) for e in sel]), rng)

    vac = [e for e in eqs if e[0] == 0]
    _, vac_ok = fit(vac) if vac else ([], True)
    phi, consistent = fit(eqs)
    per_vector, total = {}, 0
    for d2, lhs, rhs in eqs:
        res = lhs
        for k in range(P + 1):
            res = bk.axpy(res, bk.neg(phi[k]), rhs[k])
        nz = (res != 0) if bk.name == "exact" else (np.mod(res, bk.p) != 0)
        n = ex.dim(d2)
        cnt = nz.reshape(nz.shape[0], ex.N ** 2, n).sum(axis=(0, 1))
        for idx in range(n):
            per_vector[(d2, idx)] = per_vector.get((d2, idx), 0) + int(cnt[idx])
        total += int(nz.sum())
    pv = []
    for (d2, i), c in sorted(per_vector.items()):
        f, cons = fit([e for e in eqs if e[0] == d2], i)
        pv.append({"degree": str(Fraction(d2, 2)), "index": i, "residual_nonzero": c,
                   "fit_consistent": cons, "fitted": [_out(bk, x) for x in f]})
    fits = {tuple(p["fitted"]) for p in pv if p["fit_consistent"]}
    independent = all(p["fit_consistent"] for p in pv) and len(fits) == 1
    return ExchangeReport(str(module.max_degree), T, str(Fraction(top, 2)),
                          [_out(bk, x) for x in phi], consistent, vac_ok, len(eqs), total,
                          sensitive, independent, pv, consistent and total == 0 and independent)

"""Modular linear-algebra kernels for the Fock build.

Matrices hold residues mod p as float64 with p < 2**26, so a*b + c stays exact in a double.
Set ARTIFACT_NO_NUMBA=1 to use the pure-numpy path instead of the compiled one.
"""
from __future__ import annotations

import os

import numpy as np

MAX_PRIME = 1 << 26
_SPLIT = 1 << 13
_CHUNK = 4096  # inner-dimension chunk keeping split products below 2**53

USE_NUMBA = os.environ.get("ARTIFACT_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _check_prime(p: int):
    if not 2 < p < MAX_PRIME:
        raise ValueError(f"modulus must lie in (2, 2**26), got {p}")


def _rref_numpy(A: np.ndarray, p: int):
    m, n = A.shape
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + nz[0]
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        inv = float(pow(int(A[r, c]), p - 2, p))
        A[r, c:] = np.mod(A[r, c:] * inv, p)
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if len(rows):
            block = A[rows, c:] + np.outer(p - col[rows], A[r, c:])
            block -= np.floor(block * (1.0 / p)) * p
            block[block >= p] -= p
            block[block < 0] += p
            A[rows, c:] = block
        piv.append(c)
        r += 1
    return r, np.array(piv, dtype=np.int64)


if USE_NUMBA:
    @njit(cache=True)
    def _powmod(a, e, p):
        out = 1
        a = a % p
        while e:
            if e & 1:
                out = out * a % p
            a = a * a % p
            e >>= 1
        return out

    @njit(cache=True, inline="always")
    def _fix(y, p):
        # the float quotient can be off by one next to exact multiples of p
        if y >= p:
            return y - p
        if y < 0:
            return y + p
        return y

    @njit(cache=True)
    def _axpy_mod(A, i, r, g, c0, n, p, pinv):
        for j in range(c0, n):
            x = A[i, j] + g * A[r, j]
            A[i, j] = _fix(x - np.floor(x * pinv) * p, p)

    @njit(cache=True)
    def _rref_numba(A, p):
        m, n = A.shape
        pinv = 1.0 / p
        piv = np.empty(min(m, n), np.int64)
        r = 0
        for c in range(n):
            if r == m:
                break
            pr = -1
            for i in range(r, m):
                if A[i, c] != 0.0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(c, n):
                    t = A[r, j]
                    A[r, j] = A[pr, j]
                    A[pr, j] = t
            inv = float(_powmod(np.int64(A[r, c]), p - 2, p))
            for j in range(c, n):
                x = A[r, j] * inv
                A[r, j] = _fix(x - np.floor(x * pinv) * p, p)
            for i in range(r + 1, m):
                f = A[i, c]
                if f != 0.0:
                    _axpy_mod(A, i, r, p - f, c, n, p, pinv)
            piv[r] = c
            r += 1
        for k in range(r - 1, -1, -1):
            c = piv[k]
            for i in range(k):
                f = A[i, c]
                if f != 0.0:
                    _axpy_mod(A, i, k, p - f, c, n, p, pinv)
        return r, piv[:r]


def rref_mod(A: np.ndarray, p: int, backend: str | None = None):
    """Reduced row echelon form mod p; returns (R, pivot columns). A is not modified."""
    _check_prime(p)
    A = np.ascontiguousarray(np.mod(np.asarray(A, dtype=np.float64), p))
    if A.size == 0:
        return A[:0], np.zeros(0, dtype=np.int64)
    use = backend or ("numba" if USE_NUMBA else "numpy")
    if use == "numba":
        if not USE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        r, piv = _rref_numba(A, p)
    elif use == "numpy":
        r, piv = _rref_numpy(A, p)
    else:
        raise ValueError(f"unknown backend {use!r}")
    return A[:r], np.asarray(piv)


def rank_mod(A: np.ndarray, p: int, backend: str | None = None) -> int:
    return len(rref_mod(A, p, backend)[1])


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A @ B mod p through float64 BLAS, splitting B into 13-bit halves."""
    _check_prime(p)
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]))
    hi = np.floor(B / _SPLIT)
    lo = B - hi * _SPLIT
    out = np.zeros((A.shape[0], B.shape[1]))
    for s in range(0, A.shape[1], _CHUNK):
        a = A[:, s:s + _CHUNK]
        h = np.mod(a @ hi[s:s + _CHUNK], p)
        lw = np.mod(a @ lo[s:s + _CHUNK], p)
        out = np.mod(out + np.mod(h * _SPLIT, p) + lw, p)
    return out


def compress_rows(R: np.ndarray, target: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Random mod-p combinations of the rows: keeps the row space with probability >= 1 - rank/p."""
    if R.shape[0] <= target:
        return R
    S = rng.integers(0, p, size=(target, R.shape[0])).astype(np.float64)
    return matmul_mod(S, R, p)

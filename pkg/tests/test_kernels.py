import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact import _kernels

P = 67108859


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2 ** 31))
def test_numba_and_numpy_rref_agree(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 5, size=(m, n)).astype(float)
    Rn, pn = _kernels.rref_mod(A, P, "numpy")
    if _kernels.USE_NUMBA:
        Rc, pc = _kernels.rref_mod(A, P, "numba")
        assert np.array_equal(Rn, Rc) and np.array_equal(pn, pc)
    assert len(pn) <= min(m, n) and all(Rn[i, c] == 1 for i, c in enumerate(pn))


def test_rank_drop_is_seen():
    rng = np.random.default_rng(1)
    A = rng.integers(0, P, size=(30, 30)).astype(float)
    A[:, 7] = np.mod(3 * A[:, 2] + A[:, 5], P)
    assert _kernels.rank_mod(A, P) == 29


def test_matmul_mod_is_exact():
    rng = np.random.default_rng(2)
    A = rng.integers(0, P, size=(9, 11))
    B = rng.integers(0, P, size=(11, 7))
    exact = (A.astype(object) @ B.astype(object)) % P
    assert np.array_equal(_kernels.matmul_mod(A, B, P), exact.astype(float))


def test_rejects_large_modulus():
    with pytest.raises(ValueError):
        _kernels.rref_mod(np.eye(2), 2 ** 31 - 1)

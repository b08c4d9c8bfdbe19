import copy

import numpy as np
import pytest

from artifact.spinor import (SpinorError, build_L, check_L_exchange, phi_series, phi_star_series,
                             rbar_expansion)

from conftest import D3


def mod_eq(bk, A, B):
    return not np.any(np.mod(A - B, bk.p))


def test_phi_creation_on_vacuum(d3_half_small):
    m = d3_half_small
    ph = phi_series(m, 2)
    col = ph[(-1, 0)]            # z^(1/2) coefficient on the vacuum
    assert col.shape == (6, 1) and np.count_nonzero(col) == 1
    assert not any(k[1] == 0 and k[0] > 0 for k in ph)


def test_phi_star_uses_the_dual_colour(d3_half_small):
    m, bk = d3_half_small, d3_half_small.backend
    a, b = phi_series(m, -2), phi_star_series(m, 2)
    assert set(a) == set(b)
    for k in a:
        nz = np.nonzero(a[k])
        ratio = {bk.mul(y, bk.inv_scalar(x)) for x, y in zip(a[k][nz], b[k][nz])}
        assert len(ratio) <= 1


def test_vacuum_block_is_a_multiple_of_identity(d3_half_small):
    L = build_L(d3_half_small)
    vals = {(i, j): float(blk[(0, 0)][0, 0]) for (i, j), blk in L.terms.items()}
    diag = {v for (i, j), v in vals.items() if i == j}
    assert len(diag) == 1 and diag != {0.0}
    assert all(v == 0 for (i, j), v in vals.items() if i != j)


def test_z_power_zero_preserves_degree(d3_half_small):
    L = build_L(d3_half_small)
    for blk in L.terms.values():
        for (s2, d2), M in blk.items():
            assert s2 % 2 == 0
            assert M.shape == (d3_half_small.dims[d2 - s2], d3_half_small.dims[d2])


def test_rescaling_psi_rescales_l_quadratically(d3_half_small):
    m = d3_half_small
    bk, lam = m.backend, 12345.0
    scaled = copy.copy(m)
    scaled.act = {k: np.mod(M * lam, bk.p) for k, M in m.act.items()}
    scaled.data = m.data.scale_F(bk.mul(lam, lam))
    A, B = build_L(m), build_L(scaled)
    for key, blk in A.terms.items():
        for k, M in blk.items():
            assert mod_eq(bk, bk.mul_scalar(bk.mul(lam, lam), M), B.terms[key][k])


def test_dropping_the_shift_changes_l(d3_half_small):
    A, B = build_L(d3_half_small), build_L(d3_half_small, mutate="drop-shift")
    bk = d3_half_small.backend
    assert any(not mod_eq(bk, A.terms[k][s], B.terms[k][s]) for k in A.terms for s in A.terms[k])
    with pytest.raises(SpinorError):
        build_L(d3_half_small, mutate="nope")


def test_rbar_expansions_start_at_constant_term(d3_half_small):
    bk = d3_half_small.backend
    for scale, inf, swap in ((-2, True, False), (0, False, True)):
        off, coeffs = rbar_expansion(D3, bk, scale, inf, swap, 3)
        assert off == 0 and len(coeffs) == 4


def test_exchange_report_shape(d3_half_small):
    rep = check_L_exchange(d3_half_small, 1, 0)
    assert rep.equations > 0 and len(rep.fitted) == 3
    assert [p["degree"] for p in rep.per_vector] == ["0"]
    # right-hand coefficients are infinite sums in this expansion: they move with the window
    assert rep.window_sensitive > 0
    assert set(rep.to_json()) >= {"fitted", "per_vector", "ok"}

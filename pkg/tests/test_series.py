from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.clifford import ModularBackend
from artifact.series import (DOWN, UP, FormalSeries, PochhammerSpec, clifford_scalars,
                             double_swap_check, f_series, pochhammer_series, pochhammer_series_log,
                             rho_series, rho_series_dual)
from artifact.scalar import FieldElement

from conftest import B2, D3, D4

ORDER = 4
coef = st.builds(lambda e, c: FieldElement.v(e) * c, st.integers(-4, 4), st.integers(-2, 2))
series = st.dictionaries(st.integers(0, ORDER), coef, max_size=4).map(
    lambda d: FormalSeries.from_terms(d, ORDER, UP))


@settings(max_examples=25, deadline=None)
@given(series, series, series)
def test_product_is_associative_and_commutative(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@settings(max_examples=25, deadline=None)
@given(series)
def test_inverse_of_unit_series(a):
    u = a + FormalSeries.one(ORDER)
    if not u[0].is_zero():
        assert u * u.inverse() == FormalSeries.one(ORDER)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([-1, 1]), st.integers(-3, 3), st.integers(0, 2), st.booleans())
def test_pochhammer_constant_term_is_one(z, qe, xe, inverse):
    s = pochhammer_series(PochhammerSpec(B2, z, qe, xe), 3, inverse)
    assert s[0] == FieldElement(1)
    assert s.direction == (DOWN if z < 0 else UP)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([-1, 1]), st.integers(-3, 3), st.integers(0, 2))
def test_pochhammer_times_reciprocal_is_one(z, qe, xe):
    spec = PochhammerSpec(D3, z, qe, xe)
    d = DOWN if z < 0 else UP
    assert pochhammer_series(spec, 3) * pochhammer_series(spec, 3, True) == FormalSeries.one(3, d)


@pytest.mark.parametrize("kind", [B2, D3], ids=str)
def test_rho_and_f_agree_with_log_expansion(kind):
    a, b = rho_series(kind, 5), rho_series_dual(kind, 5)
    assert a.power == b.power and not a.up.agrees(b.up) and not a.down.agrees(b.down)
    assert not f_series(kind, 5).agrees(f_series(kind, 5, expand=pochhammer_series_log))


@pytest.mark.parametrize("kind", [B2, D3], ids=str)
def test_double_swap_is_one(kind):
    rep = double_swap_check(kind, 8)
    assert rep.ok, rep.to_json()


@pytest.mark.parametrize("mutate", ["flip-q"])
def test_double_swap_catches_rho_fault(mutate):
    assert not double_swap_check(B2, 4, mutate=mutate).ok


@pytest.mark.parametrize("kind", [B2, D3, D4], ids=str)
def test_g_times_antisymmetric_eigenvalue_is_f_inverted(kind):
    order = 4
    F, G = clifford_scalars(kind, order)
    q2 = FieldElement.q(2)
    lhs = G * FormalSeries.from_terms({0: -q2, 1: FieldElement(1)}, order, UP)
    rhs = F.invert_variable() * FormalSeries.from_terms({0: FieldElement(1), 1: -q2}, order, UP)
    assert not lhs.agrees(rhs)


def test_frozen_d3_exchange_scalars_mod_p():
    F, G = clifford_scalars(D3, 3)
    bk = ModularBackend(67108859, 987654)
    assert [int(bk.field(F[-k])) for k in range(4)] == [1, 28660051, 49066787, 31015027]
    assert [int(bk.field(G[k])) for k in range(4)] == [49698457, 41264736, 37766642, 33179604]


def test_frozen_f_b2_first_coefficient():
    v = FieldElement.v
    c = f_series(B2, 2)[-1]
    assert c == (-v(-4) + v(-2) - 1 + v(2) - v(4)) / (1 - v(2) + v(4))


def test_substitute_and_window():
    s = FormalSeries.from_terms({0: 1, 1: 2}, 3, UP)
    assert s.shift(Fraction(1, 2)).lo == Fraction(1, 2)
    with pytest.raises(KeyError):
        s[5]

from fractions import Fraction

import pytest

from artifact.rmatrix import (build_rbar, check_intertwining, check_ybe, invariant_dimension,
                              invariant_vector, unitarity_scalar, INTERTWINING_ORIENTATION)
from artifact.scalar import FieldElement

from conftest import ALL_KINDS, B2, B3, D3

SAMPLES = [(Fraction(2, 3), 5, 7), (Fraction(3, 5), Fraction(7, 2), -3),
           (Fraction(5, 4), Fraction(-2, 3), Fraction(9, 5))]


@pytest.mark.parametrize("kind", [B2, B3, D3], ids=str)
def test_ybe_sampled(kind):
    rep = check_ybe(kind, samples=SAMPLES)
    assert rep.ok and len(rep.points) == 3


def test_ybe_exact_in_z_b2():
    rep = check_ybe(B2, mode="exact")
    assert rep.ok and rep.exact_in_z


def test_swap_sign_breaks_ybe():
    assert not check_ybe(B2, samples=SAMPLES[:1], R=build_rbar(B2, "swap-sign")).ok


@pytest.mark.parametrize("kind", [B2, D3], ids=str)
def test_intertwining_orientation(kind):
    rep = check_intertwining(kind)
    assert rep.orientation == INTERTWINING_ORIENTATION


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_unitarity_scalar_is_one(kind):
    assert unitarity_scalar(kind).is_one


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_invariant_space_is_one_dimensional(kind):
    assert invariant_dimension(kind) == 1


def test_frozen_b2_invariant():
    v = FieldElement.v
    assert invariant_vector(B2) == {(1, -1): FieldElement(1), (2, -2): v(2), (0, 0): v(4),
                                    (-2, 2): v(4), (-1, 1): v(6)}


def test_frozen_d3_invariant():
    v = FieldElement.v
    assert invariant_vector(D3) == {(1, -1): FieldElement(1), (2, -2): v(2), (3, -3): v(4),
                                    (-3, 3): v(4), (-2, 2): v(6), (-1, 1): v(8)}


@pytest.mark.parametrize("kind", [B2, D3], ids=str)
def test_rbar_at_one_is_the_flip(kind):
    N = kind.N
    S = build_rbar(kind).specialize(Fraction(2, 3), 1)
    flip = {(a * N + b, b * N + a): Fraction(1) for a in range(N) for b in range(N)}
    assert dict(((r, c), x) for (r, c), x in S.entries() if x != 0) == flip

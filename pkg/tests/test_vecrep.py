import pytest

from artifact.vecrep import (GeneratorLabel, LaurentMatrix, LaurentPoly, derive_xi, duality_matrix,
                             generator_matrix, intertwines, sign_flip, verify_relations, xi_exponent)
from artifact.scalar import FieldElement

from conftest import ALL_KINDS, B2, D3


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_defining_relations_hold(kind):
    assert verify_relations(kind) == []


@pytest.mark.parametrize("kind", [B2, D3], ids=str)
@pytest.mark.parametrize("g", ["e", "f", "t"])
def test_single_sign_flip_is_caught(kind, g):
    assert verify_relations(kind, sign_flip(GeneratorLabel(g, 1)))


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_xi_is_unique_and_pinned(kind):
    rep = derive_xi(kind)
    # pinned solver output: q^(N - 2)
    assert (rep.exponent, rep.sign) == (kind.N - 2, 1)
    assert xi_exponent(kind) == rep.exponent
    assert intertwines(kind, rep.xi, 1) == [] and intertwines(kind, rep.xi, -1) == []


def test_wrong_xi_fails_to_intertwine():
    assert intertwines(D3, FieldElement.q(3), 1)


def test_duality_matrix_relabels_colours():
    C = duality_matrix(B2, 1)
    assert set(C.entries) == {(4 - p, p) for p in range(5)}


def test_t_is_diagonal_and_invertible():
    t = generator_matrix(B2, GeneratorLabel("t", 0))
    ti = generator_matrix(B2, GeneratorLabel("t_inv", 0))
    assert all(r == c for r, c in t.entries)
    assert (t @ ti - LaurentMatrix.identity(5)).is_zero()


def test_laurent_poly_arithmetic():
    p = LaurentPoly({-1: 1, 2: 3})
    assert (p * p).terms == {-2: 1, 1: 6, 4: 9}
    assert (p - p).is_zero()

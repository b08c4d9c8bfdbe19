from fractions import Fraction

import pytest

from artifact.cartan import AlgebraKind, CartanError, build_cartan

from conftest import ALL_KINDS, B2, D4


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_marks_and_comarks_span_the_null_spaces(kind):
    cd = build_cartan(kind)
    A = cd.cartan_matrix()
    r = range(len(A))
    assert all(sum(A[i][j] * cd.marks[j] for j in r) == 0 for i in r)
    assert all(sum(cd.comarks[i] * A[i][j] for i in r) == 0 for j in r)
    assert all(A[i][i] == 2 for i in range(len(A)))


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_index_set_and_bar_are_consistent(kind):
    cd = build_cartan(kind)
    assert len(cd.index_set) == cd.N == kind.N
    assert sorted(cd.bar.values()) == sorted(cd.bar_index(j) for j in cd.index_set)
    assert [cd.position(j) for j in cd.index_set] == list(range(cd.N))


def test_frozen_b2_data():
    cd = build_cartan(B2)
    assert cd.index_set == (1, 2, 0, -2, -1)
    assert cd.dual_coxeter == 3
    assert cd.marks == (1, 1, 2)
    assert cd.pairing(1, 1) == Fraction(2)


def test_frozen_d4_dual_coxeter():
    assert build_cartan(D4).dual_coxeter == 6


@pytest.mark.parametrize("series,rank", [("B", 1), ("D", 2), ("C", 3)])
def test_rejects_out_of_range(series, rank):
    with pytest.raises(CartanError):
        AlgebraKind(series, rank)

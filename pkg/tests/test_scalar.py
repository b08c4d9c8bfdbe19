from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.scalar import FieldElement

exps = st.integers(-6, 6)
small = st.integers(-3, 3)


def poly(coeffs):
    out = FieldElement(0)
    for e, c in coeffs:
        out = out + FieldElement.v(e) * c
    return out


elements = st.lists(st.tuples(exps, small), min_size=1, max_size=3).map(poly)


@settings(max_examples=40, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@settings(max_examples=40, deadline=None)
@given(elements)
def test_inverse(a):
    if not a.is_zero():
        assert a * a.inverse() == FieldElement(1)


@settings(max_examples=40, deadline=None)
@given(elements, st.fractions(min_value=Fraction(1, 3), max_value=Fraction(7, 2)))
def test_specialize_is_a_homomorphism(a, v):
    b = a * a + FieldElement.v(1)
    assert b.specialize(v) == a.specialize(v) ** 2 + v


def test_q_is_v_squared():
    assert FieldElement.q(3) == FieldElement.v(6)
    assert FieldElement.q(1).specialize(Fraction(5, 3)) == Fraction(25, 9)

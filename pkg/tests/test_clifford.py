from fractions import Fraction

import pytest

from artifact.clifford import (CliffordError, CliffordType, CutoffError, ModeGenerator, act,
                               basis_vector, build_fock, classical_oracle, compare_with_oracle,
                               graded_dims, mode_relations, vacuum, verify_relations)

from conftest import B2, D3, D4


def dims(module):
    return [n for _, n in graded_dims(module)]


def test_oracle_values():
    half = classical_oracle(CliffordType(D3, "Z+1/2"), "7/2")
    assert [n for _, n in half] == [1, 6, 15, 26, 51, 102, 172, 276]
    assert [n for _, n in classical_oracle(CliffordType(B2, "Z"), 3)] == [4, 20, 60, 160]


def test_d3_half_dims_match_oracle(d3_half):
    assert dims(d3_half) == [1, 6, 15, 26, 51, 102, 172, 276]
    assert all(r["equal"] for r in compare_with_oracle(d3_half))


def test_b2_integer_dims_match_oracle(b2_z):
    assert dims(b2_z) == [4, 20, 60, 160]
    assert dims(b2_z)[0] == 2 ** (5 // 2)


def test_relations_hold_on_built_modules(d3_half_small, b2_z):
    for m, top in ((d3_half_small, None), (b2_z, 4)):
        rep = verify_relations(m, top)
        assert rep.ok and rep.checked > 0, rep.failures[:3]


def test_d4_half_low_degrees():
    m = build_fock(CliffordType(D4, "Z+1/2"), 1, trials=1)
    assert dims(m) == [1, 8, 28]
    assert verify_relations(m).ok


def test_exact_and_modular_agree():
    t = CliffordType(D3, "Z+1/2")
    ex = build_fock(t, "3/2", backend="exact", trials=1)
    mo = build_fock(t, "3/2", trials=2)
    assert dims(ex) == dims(mo) == [1, 6, 15, 26]
    assert verify_relations(ex).ok


def test_f1_sign_flip_breaks_the_build():
    m = build_fock(CliffordType(D3, "Z+1/2"), 2, trials=1, mutate="flip-f1")
    assert dims(m) != [n for _, n in classical_oracle(m.ctype, 2)]
    assert not verify_relations(m).ok


def test_positive_modes_annihilate_vacuum(d3_half_small):
    vac = vacuum(d3_half_small)
    for c in (1, -1, 3):
        for m in (Fraction(1, 2), Fraction(3, 2)):
            assert act(ModeGenerator(c, m), vac).is_zero()
        assert not act(ModeGenerator(c, Fraction(-1, 2)), vac).is_zero()


def test_creation_words_rebuild_basis(d3_half_small):
    m = d3_half_small
    for d2 in (1, 2):
        for i in range(m.dims[d2]):
            x = vacuum(m)
            for g in reversed(m.word(d2, i)):
                x = act(g, x)
            target = basis_vector(m, d2, i)
            assert x.d2 == d2 and (x.coeffs == target.coeffs).all()


def test_mode_relation_bookkeeping():
    op = mode_relations(CliffordType(D3, "Z+1/2"), 1, -1, Fraction(1, 2), Fraction(-1, 2), 3)
    assert op.delta is not None
    assert mode_relations(CliffordType(D3, "Z+1/2"), 1, 2, Fraction(1, 2), Fraction(1, 2), 3).delta is None
    with pytest.raises(CutoffError):
        mode_relations(CliffordType(D3, "Z+1/2"), 1, 2, Fraction(1, 2), Fraction(-5, 2), 1, state_degree=2)
    with pytest.raises(CliffordError):
        mode_relations(CliffordType(D3, "Z+1/2"), 1, 2, 1, 0, 3)


def test_half_lattice_needs_type_d():
    with pytest.raises(CliffordError):
        CliffordType(B2, "Z+1/2")


def test_cache_roundtrip(tmp_path):
    t = CliffordType(D3, "Z+1/2")
    a = build_fock(t, 1, trials=1, cache_dir=tmp_path)
    assert list(tmp_path.iterdir())
    b = build_fock(t, 1, trials=1, cache_dir=tmp_path)
    assert dims(a) == dims(b)

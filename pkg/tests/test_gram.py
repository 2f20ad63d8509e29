"""Tests for the pairing, spanning sets, idempotents and quotient algebras."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from octqft.character import CharacterForm, eval_character
from octqft.cobordism import Id, TermTypeError, parse, pretty
from octqft.gram import (
    MOD_P1,
    LinComb,
    _ModularPivot,
    build_idempotents,
    categorical_trace,
    enumerate_end_terms,
    gram_rank,
    hole_idempotent,
    is_negligible,
    lc,
    lc_collapse,
    lc_compose,
    lc_identity,
    lc_scale,
    lc_sub,
    minimal_poly_negligibility,
    pair,
    quotient_algebra,
    rational_character,
    sigma_endo,
    spanning_end,
    verify_splitting,
)

CHI2 = CharacterForm.make(exp_terms=[(1, 3, 2)])          # f = 2/((1-X)(1-3Y))
CHI_ZERO = CharacterForm.make()
CHI_POLY3 = CharacterForm.make(alpha_Y2=3)


# ---------------------------------------------------------------------------
# characters given by rational generating functions


def test_rational_character_geometric():
    chi = rational_character({(0, 0): 1}, {(0, 0): 1, (0, 1): -1}, "1/(1-Y)")
    for w in range(6):
        assert chi.value(0, w) == 1
    assert chi.value(1, 0) == 0
    assert chi.value(2, 3) == 0


def test_rational_character_matches_closed_form():
    chi = rational_character(
        {(0, 0): 2}, {(0, 0): 1, (1, 0): -1, (0, 1): -3, (1, 1): 3}
    )
    for g in range(5):
        for w in range(5):
            assert chi.value(g, w) == eval_character(CHI2, g, w)


def test_rational_character_rejects_zero_constant_denominator():
    with pytest.raises(ValueError):
        rational_character({(0, 0): 1}, {(1, 0): 1})


# ---------------------------------------------------------------------------
# the pairing


def test_pair_cylinder_closes_to_torus():
    f = lc_identity("S")
    assert pair(f, f, CHI2) == eval_character(CHI2, 1, 0)
    assert pair(f, f, CHI2) == 2


def test_pair_cap_cup_closes_to_spheres():
    assert pair(lc_identity("S"), lc(parse("eS ; uS")), CHI2) == eval_character(CHI2, 0, 0)


def test_pair_with_zero_lincomb():
    assert pair(LinComb([]), lc_identity("S"), CHI2) == 0
    assert pair(lc_identity("S"), LinComb([]), CHI2) == 0


def test_pair_bilinear():
    f = lc(sigma_endo(1, 0))
    g = lc(sigma_endo(0, 1))
    assert pair(lc_scale(f, 5), g, CHI2) == 5 * pair(f, g, CHI2)


def test_pair_type_errors():
    with pytest.raises(TermTypeError):
        pair(lc_identity("S"), lc_identity("I"), CHI2)
    with pytest.raises(TermTypeError):
        pair(lc(parse("z")), lc(parse("z")), CHI2)


_S_ENDOS = [
    Id("S"),
    parse("eS ; uS"),
    parse("dS ; mS"),
    parse("z ; zs"),
    parse("dS ; mS ; z ; zs"),
]
_I_ENDOS = [
    Id("I"),
    parse("eI ; uI"),
    parse("dI ; mI"),
    parse("zs ; z"),
    parse("zs ; dS ; mS ; z"),
]


@settings(max_examples=40, deadline=None)
@given(
    i=st.integers(min_value=0, max_value=4),
    j=st.integers(min_value=0, max_value=4),
    open_sector=st.booleans(),
)
def test_pair_symmetric(i, j, open_sector):
    pool = _I_ENDOS if open_sector else _S_ENDOS
    f, g = lc(pool[i]), lc(pool[j])
    assert pair(f, g, CHI2) == pair(g, f, CHI2)


def test_categorical_trace_values():
    assert categorical_trace(lc_identity("S"), CHI2) == 2          # torus
    assert categorical_trace(lc(sigma_endo(0, 1)), CHI2) == 6      # torus + window
    assert categorical_trace(lc_identity("I"), CHI2) == 18         # annulus: chi(0,2)


# ---------------------------------------------------------------------------
# curated spanning sets


def test_spanning_bounds_single_exp_term():
    ts = spanning_end("S", CHI2)
    assert ts.g_bound == 3 and ts.w_bound == 3
    assert len(ts.spanning) == 16 + 256
    for e in ts.spanning:
        assert e.signature() == ("S", "S")


def test_spanning_bounds_polynomial_only():
    ts = spanning_end("I", CHI_POLY3)
    assert ts.g_bound == 2 and ts.w_bound == 2
    assert len(ts.spanning) == 1 + 9 + 81
    for e in ts.spanning:
        assert e.signature() == ("I", "I")


def test_spanning_rejects_table_characters_and_bad_objects():
    chi = rational_character({(0, 0): 1}, {(0, 0): 1, (0, 1): -1})
    with pytest.raises(TypeError):
        spanning_end("S", chi)
    with pytest.raises(ValueError):
        spanning_end("II", CHI2)


# ---------------------------------------------------------------------------
# Gram ranks


def test_gram_rank_end_s_dimension_two():
    m, r = gram_rank(spanning_end("S", CHI2), CHI2)
    assert r == 2


def test_gram_rank_zero_character():
    ts = spanning_end("S", CHI_ZERO)
    m, r = gram_rank(ts, CHI_ZERO)
    assert r == 0
    assert all(m[i, j] == 0 for i in range(len(ts.spanning)) for j in range(3))


def test_gram_rank_pgl1_regression():
    ts = spanning_end("S", CharacterForm.make(exp_terms=[(1, 1, 1)]))
    m, r = gram_rank(ts, CharacterForm.make(exp_terms=[(1, 1, 1)]))
    assert r == 1


# ---------------------------------------------------------------------------
# negligibility


def test_window_shift_negligible():
    f = lc_sub(lc(sigma_endo(0, 1)), lc_scale(lc_identity("S"), 3))
    assert is_negligible(f, spanning_end("S", CHI2), CHI2)


def test_identity_not_negligible():
    assert not is_negligible(lc_identity("S"), spanning_end("S", CHI2), CHI2)


def test_minimal_polys_two_handle_roots():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1), (4, 3, 1)])
    report = minimal_poly_negligibility(chi)
    assert report.k == 2
    assert report.handle_roots == (2, 4)
    assert report.passed


def test_minimal_polys_polynomial_only():
    report = minimal_poly_negligibility(CHI_POLY3)
    assert report.hole_roots == ()
    assert report.passed


def test_minimal_polys_zero_character():
    assert minimal_poly_negligibility(CHI_ZERO).passed


# ---------------------------------------------------------------------------
# idempotents and splitting


def test_single_term_handle_idempotent_formula():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1)])
    idem = build_idempotents(chi)
    e2 = idem.e_lambda[Fraction(2)]
    assert e2.terms == [(Fraction(1, 4), sigma_endo(2, 0))]


def test_two_window_idempotent_formula():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1), (2, 5, 1)])
    idem = build_idempotents(chi)
    e2 = idem.e_lambda[Fraction(2)]
    w_shift = lc_sub(lc(sigma_endo(0, 1)), lc_scale(lc_identity("S"), 5))
    expected = lc_compose(e2, lc_scale(w_shift, Fraction(1, 3 - 5)))
    diff = lc_collapse(lc_sub(idem.e_pair[(Fraction(2), Fraction(3))], expected))
    assert not diff.terms


def test_hole_idempotent_rejects_zero():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1)])
    with pytest.raises(ValueError):
        hole_idempotent(chi, 0)


def test_idempotents_orthogonal_two_blocks():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1), (4, 5, 1)])
    idem = build_idempotents(chi)      # internal verification would raise
    s_space = spanning_end("S", chi)
    e = idem.e_pair[(Fraction(2), Fraction(3))]
    assert is_negligible(lc_sub(lc_compose(e, e), e), s_space, chi)


def test_splitting_two_blocks():
    chi = CharacterForm.make(exp_terms=[(2, 3, 1), (4, 5, 1)])
    report = verify_splitting(chi, 3, 3)
    assert report.passed
    assert set(report.components) == {(2, 3), (4, 5)}


def test_splitting_single_block_reproduces_character():
    chi = CharacterForm.make(exp_terms=[(1, 2, 1)])
    report = verify_splitting(chi, 3, 3)
    assert report.passed


# ---------------------------------------------------------------------------
# generic enumeration


def test_enumerate_identity_only_at_budget_zero():
    ts = enumerate_end_terms("I", 0)
    assert [pretty(e.terms[0][1]) for e in ts.spanning] == ["id:I"]


def test_enumerate_budget_two_on_i():
    ts = enumerate_end_terms("I", 2)
    names = {pretty(e.terms[0][1]) for e in ts.spanning}
    assert names == {"id:I", "dI ; mI", "eI ; uI", "zs ; z"}


def test_enumerate_monotone_in_budget():
    sizes = [len(enumerate_end_terms("I", b).spanning) for b in (0, 2, 4)]
    assert sizes[0] <= sizes[1] <= sizes[2]
    assert sizes == [1, 4, 9]


# ---------------------------------------------------------------------------
# quotient algebras


def test_quotient_end_s_dim_two_with_cap_idempotent():
    ts = spanning_end("S", CHI2)
    qa = quotient_algebra(ts, CHI2)
    assert qa.dim == 2
    cap = lc_scale(lc(parse("eS ; uS")), Fraction(1, 2))
    assert is_negligible(lc_sub(lc_compose(cap, cap), cap), ts, CHI2)


def test_quotient_zero_character():
    qa = quotient_algebra(spanning_end("S", CHI_ZERO), CHI_ZERO)
    assert qa.dim == 0
    assert qa.mult_table == {}


def test_quotient_end_i_polynomial_regression():
    ts = spanning_end("I", CHI_POLY3)
    m, r = gram_rank(ts, CHI_POLY3)
    qa = quotient_algebra(ts, CHI_POLY3)
    assert r == 5
    assert qa.dim == r


def test_quotient_unit_coordinates():
    qa = quotient_algebra(spanning_end("S", CHI2), CHI2)
    unit = qa.unit_coords
    for j in range(qa.dim):
        acting = [
            sum(unit[i] * qa.mult_table[(i, j)][l] for i in range(qa.dim))
            for l in range(qa.dim)
        ]
        expect = [1 if l == j else 0 for l in range(qa.dim)]
        assert acting == expect


# ---------------------------------------------------------------------------
# pivot completion needs 2x2 blocks on indefinite forms


def test_modular_pivot_accepts_pair_after_singles_stall():
    gram = {
        (0, 0): 1, (0, 1): 1, (0, 2): 1,
        (1, 0): 1, (1, 1): 1, (1, 2): 0,
        (2, 0): 1, (2, 1): 0, (2, 2): 1,
    }
    piv = _ModularPivot(lambda a, b: gram[(a, b)] % MOD_P1, MOD_P1)
    assert piv.accept_single(0)
    assert not piv.accept_single(1)
    assert not piv.accept_single(2)
    assert piv.accept_pair(1, 2)
    assert piv.keys == [0, 1, 2]

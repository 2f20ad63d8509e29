from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from octqft.character import (
    CharacterForm, Good, Indeterminate, NotGood, SequenceTable, char_add, char_mul,
    char_scale, classify_rational, classify_table, eval_character, parse_rational_expr,
    scale_transform, to_table,
)


def tbl(fn, g_max=6, w_max=6):
    return SequenceTable.from_rows(
        [[fn(g, w) for w in range(w_max + 1)] for g in range(g_max + 1)])


def test_eval_and_poly_spots():
    f = CharacterForm.make(alpha_1=5, alpha_X=3, alpha_Y=2, alpha_Y2=3)
    assert eval_character(f, 0, 0) == 5
    assert eval_character(f, 1, 0) == 3
    assert eval_character(f, 0, 1) == 2
    assert eval_character(f, 0, 2) == 3
    assert eval_character(f, 1, 1) == 0
    assert eval_character(f, 2, 0) == 0


def test_mu_zero_column_convention():
    f = CharacterForm.make(exp_terms=[(2, 0, 1)])
    assert eval_character(f, 3, 0) == 8
    assert eval_character(f, 3, 1) == 0


def test_make_merges_and_sorts():
    f = CharacterForm.make(exp_terms=[(2, 3, 1), (1, 1, 4), (2, 3, -1)])
    assert f.exp_terms == ((F(1), F(1), F(4)),)
    with pytest.raises(ValueError):
        CharacterForm.make(exp_terms=[(0, 1, 1)])


def test_char_ops_pointwise():
    a = CharacterForm.make(alpha_X=2, exp_terms=[(1, 2, 1)])
    b = CharacterForm.make(alpha_1=3, exp_terms=[(2, 1, 5)])
    s = char_add(a, b)
    m = char_mul(a, b)
    for g in range(5):
        for w in range(5):
            va, vb = eval_character(a, g, w), eval_character(b, g, w)
            assert eval_character(s, g, w) == va + vb
            assert eval_character(m, g, w) == va * vb
    assert char_scale(a, 0) == CharacterForm.make()


def test_classify_table_spec_examples():
    # constant-in-g geometric: f = 1/((1-X)(1-2Y))
    res = classify_table(tbl(lambda g, w: F(2) ** w), 1)
    assert isinstance(res, Good)
    assert res.form == CharacterForm.make(exp_terms=[(1, 2, 1)])
    # bad family 1/(1-3Y): rows g >= 2 vanish but remainder sticks out
    res = classify_table(tbl(lambda g, w: F(3) ** w if g == 0 else F(0)), 1)
    assert isinstance(res, NotGood)
    assert res.witness == (0, 3)
    # bad family X/(1-2Y)
    res = classify_table(tbl(lambda g, w: F(2) ** w if g == 1 else F(0)), 1)
    assert isinstance(res, NotGood)
    assert res.witness == (1, 1)


def test_classify_table_too_small():
    with pytest.raises(ValueError):
        classify_table(tbl(lambda g, w: F(0), 5, 5), 1)


def test_classify_two_terms_with_poly():
    f = CharacterForm.make(alpha_1=7, alpha_Y2=-2,
                           exp_terms=[(2, 3, 1), (4, 5, F(1, 2))])
    res = classify_table(to_table(f, 9, 9), 2)
    assert isinstance(res, Good)
    assert res.form == f


def test_classify_mu_zero_reconstruction():
    f = CharacterForm.make(alpha_Y=1, exp_terms=[(3, 0, 2), (3, 2, 1)])
    res = classify_table(to_table(f, 7, 7), 1)
    assert isinstance(res, Good)
    assert res.form == f


def test_classify_indeterminate_irrational():
    # rows g >= 2 behave like sqrt(2)-geometric: 2^(g/2) for even g
    def fn(g, w):
        if w == 0 and g % 2 == 0:
            return F(2) ** (g // 2)
        return F(0)
    res = classify_table(tbl(lambda g, w: fn(g, w), 8, 8), 2)
    assert isinstance(res, Indeterminate)


def test_classify_repeated_root_not_good():
    # g * 2^g grows with a repeated eigenvalue: not a finite exp sum
    res = classify_table(tbl(lambda g, w: g * F(2) ** g if w == 0 else F(0), 10, 10), 3)
    assert isinstance(res, NotGood)
    assert "repeated" in res.reason or "zero" in res.reason


def test_classify_rational_spec_examples():
    num, den = parse_rational_expr("1/((1-2*X)*(1-3*Y))")
    res = classify_rational(num, den)
    assert isinstance(res, Good)
    assert res.form == CharacterForm.make(exp_terms=[(2, 3, 1)])

    num, den = parse_rational_expr("5 + 3*X + 2*Y + 3*Y*Y")
    res = classify_rational(num, den)
    assert isinstance(res, Good)
    assert res.form == CharacterForm.make(alpha_1=5, alpha_X=3, alpha_Y=2, alpha_Y2=3)

    num, den = parse_rational_expr("1/(1-Y)")
    assert isinstance(classify_rational(num, den), NotGood)

    num, den = parse_rational_expr("X/(1-2*Y)")
    assert isinstance(classify_rational(num, den), NotGood)


def test_classify_rational_pure_x_denominator():
    num, den = parse_rational_expr("1/(1-2*X)")
    res = classify_rational(num, den)
    assert isinstance(res, Good)
    assert res.form == CharacterForm.make(exp_terms=[(2, 0, 1)])


def test_classify_rational_zero_constant_term():
    num, den = parse_rational_expr("1/X")
    with pytest.raises(ValueError):
        classify_rational(num, den)


def test_parse_rational_expr():
    num, den = parse_rational_expr("(1+X)/(1-Y) - 1")
    # (1+X)/(1-Y) - 1 = (X+Y)/(1-Y)
    from octqft.character import _bp_mul, _bp_add, _bp_neg
    # cross-multiplied equality: num*(1-Y) == (X+Y)*den
    lhs = _bp_mul(num, {(0, 0): F(1), (0, 1): F(-1)})
    rhs = _bp_mul({(1, 0): F(1), (0, 1): F(1)}, den)
    assert _bp_add(lhs, _bp_neg(rhs)) == {}
    with pytest.raises(ValueError):
        parse_rational_expr("1 + * 2")
    with pytest.raises(ValueError):
        parse_rational_expr("Z")
    with pytest.raises(ValueError):
        parse_rational_expr("1/(X-X)")


def test_scale_transform_law():
    f = CharacterForm.make(alpha_1=3, alpha_X=1, alpha_Y=2, alpha_Y2=5,
                           exp_terms=[(2, 3, 4)])
    for s in (F(2), F(1, 2), F(-1)):
        g = scale_transform(f, s)
        for gg in range(5):
            for ww in range(5):
                expect = s ** (-2 * (2 - 2 * gg - ww)) * eval_character(f, gg, ww)
                assert eval_character(g, gg, ww) == expect
    with pytest.raises(ValueError):
        scale_transform(f, 0)


def test_form_json_roundtrip():
    f = CharacterForm.make(alpha_Y=F(-1, 3), exp_terms=[(F(1, 2), -2, 7)])
    assert CharacterForm.from_json(f.to_json()) == f
    t = to_table(f, 3, 4)
    assert SequenceTable.from_json(t.to_json()) == t


small = st.fractions(min_value=-5, max_value=5, max_denominator=3)
nonzero = small.filter(lambda x: x != 0)


@st.composite
def forms(draw):
    n = draw(st.integers(0, 3))
    seen = set()
    terms = []
    for _ in range(n):
        lam = draw(nonzero)
        mu = draw(small)
        if (lam, mu) in seen:
            continue
        seen.add((lam, mu))
        terms.append((lam, mu, draw(nonzero)))
    return CharacterForm.make(
        alpha_1=draw(small), alpha_X=draw(small), alpha_Y=draw(small),
        alpha_Y2=draw(small), exp_terms=terms)


@given(forms())
@settings(max_examples=40, deadline=None)
def test_roundtrip_recognition(f):
    res = classify_table(to_table(f, 10, 10), 3)
    assert isinstance(res, Good)
    assert res.form == f


@given(forms(), forms())
@settings(max_examples=25, deadline=None)
def test_product_matches_tables(a, b):
    m = char_mul(a, b)
    for g in range(6):
        for w in range(6):
            assert eval_character(m, g, w) == eval_character(a, g, w) * eval_character(b, g, w)

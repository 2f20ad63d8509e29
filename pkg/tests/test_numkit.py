from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from octqft.numkit import (
    Matrix, Poly, Tensor, is_squarefree, minimal_polynomial, poly_gcd, rank_of_rows,
    rat, rat_to_str, rational_roots, recurrence_from_sequences,
)


def test_rat_roundtrip():
    assert rat("3") == 3
    assert rat("-5/2") == F(-5, 2)
    assert rat_to_str(F(4, 2)) == "2"
    assert rat_to_str(F(-1, 3)) == "-1/3"


def test_tensor_indexing():
    t = Tensor.zeros([2, 3, 2])
    t[1, 2, 0] = F(5)
    assert t[1, 2, 0] == 5
    assert t[0, 0, 0] == 0
    assert t.nonzeros() == [(t.flat_index((1, 2, 0)), F(5))]
    assert t.unflatten(t.flat_index((1, 2, 0))) == (1, 2, 0)


def test_scalar_tensor():
    s = Tensor([], [F(7)])
    assert s.shape == ()
    assert s.entries == [F(7)]


def test_matrix_mul_oracle():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[0, 1], [1, 0]])
    assert (a * b).to_rows() == [[2, 1], [4, 3]]
    assert (a * Matrix.identity(2)) == a
    assert a.trace() == 5


def test_kron_index_convention():
    # e_i x e_j lives at flat position i*dim2 + j
    a = Matrix.from_rows([[0, 1], [2, 0]])
    b = Matrix.from_rows([[3]])
    k = a.kron(b)
    assert k.to_rows() == [[0, 3], [6, 0]]
    c = Matrix.from_rows([[1, 0], [0, 1]]).kron(Matrix.from_rows([[0, 1], [1, 0]]))
    # block diagonal of swaps
    assert c.to_rows() == [
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ]


def test_rank_and_inverse():
    a = Matrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert a.rank() == 2
    assert a.inverse() is None
    b = Matrix.from_rows([[2, 1], [1, 1]])
    binv = b.inverse()
    assert (b * binv) == Matrix.identity(2)
    assert binv.to_rows() == [[1, -1], [-1, 2]]


def test_solve_and_nullspace():
    a = Matrix.from_rows([[1, 1, 0], [0, 1, 1]])
    x = a.solve([3, 5])
    assert x is not None
    assert [sum(r[j] * x[j] for j in range(3)) for r in a.to_rows()] == [3, 5]
    assert a.solve([1, 1]) is not None
    bad = Matrix.from_rows([[1, 1], [1, 1]])
    assert bad.solve([0, 1]) is None
    ns = a.nullspace()
    assert len(ns) == 1
    v = ns[0]
    assert [sum(r[j] * v[j] for j in range(3)) for r in a.to_rows()] == [0, 0]


def test_rank_of_rows_empty():
    assert rank_of_rows([]) == 0
    assert rank_of_rows([[0, 0]]) == 0


def test_poly_arith():
    p = Poly([1, 2, 1])        # (1+t)^2
    q = Poly([-1, 1])          # t-1
    assert (p * q).coeffs == (F(-1), F(-1), F(1), F(1))
    quo, rem = (p * q).divmod(p)
    assert quo == q and rem.is_zero()
    assert p(2) == 9
    assert p.derivative() == Poly([2, 2])
    assert Poly.from_roots([1, 2]) == Poly([2, -3, 1])


def test_poly_gcd_squarefree():
    p = Poly.from_roots([1, 1, 2])
    assert poly_gcd(p, p.derivative()) == Poly([-1, 1])
    assert not is_squarefree(p)
    assert is_squarefree(Poly.from_roots([1, 2, 3]))
    assert is_squarefree(Poly([5]))


def test_minimal_polynomial_oracle():
    # diagonal(2,2,3): minimal polynomial (t-2)(t-3) = t^2 - 5t + 6
    m = Matrix.from_rows([[2, 0, 0], [0, 2, 0], [0, 0, 3]])
    assert minimal_polynomial(m) == Poly([6, -5, 1])
    # nilpotent Jordan block: t^2
    n = Matrix.from_rows([[0, 1], [0, 0]])
    assert minimal_polynomial(n) == Poly([0, 0, 1])
    assert minimal_polynomial(Matrix.identity(4)) == Poly([-1, 1])


def test_rational_roots_oracle():
    p = Poly.from_roots([F(1, 2), F(1, 2), -3, 0])
    roots, split = rational_roots(p)
    assert roots == [(F(-3), 1), (F(0), 1), (F(1, 2), 2)]
    assert split
    # t^2 + 1 has no rational roots
    roots, split = rational_roots(Poly([1, 0, 1]))
    assert roots == [] and not split
    # (t^2-2)(t-1): partial split
    roots, split = rational_roots(Poly.from_roots([1]) * Poly([-2, 0, 1]))
    assert roots == [(F(1), 1)] and not split


def test_recurrence_oracle():
    # 2^k and 3^k jointly satisfy (t-2)(t-3)
    s2 = [F(2) ** k for k in range(9)]
    s3 = [F(3) ** k for k in range(9)]
    p = recurrence_from_sequences([s2, s3], 4)
    assert p == Poly([6, -5, 1])
    # geometric alone: minimal order 1
    assert recurrence_from_sequences([s2], 4) == Poly([-2, 1])
    # all-zero convention
    assert recurrence_from_sequences([[F(0)] * 9], 4) == Poly.t()
    # no order-2 recurrence for k! windows
    fact = [F(1), F(1), F(2), F(6), F(24), F(120), F(720), F(5040), F(40320)]
    assert recurrence_from_sequences([fact], 4) is None


def test_recurrence_short_data_rejected():
    with pytest.raises(ValueError):
        recurrence_from_sequences([[F(1)] * 6], 3)


def test_recurrence_finite_support():
    # 0,0,1,0,0,... needs t^3
    s = [F(0), F(0), F(1)] + [F(0)] * 6
    assert recurrence_from_sequences([s], 4) == Poly([0, 0, 0, 1])


small_rats = st.fractions(min_value=-6, max_value=6, max_denominator=6)


@given(st.lists(small_rats, min_size=1, max_size=5))
@settings(max_examples=50, deadline=None)
def test_from_roots_has_those_roots(roots):
    p = Poly.from_roots(roots)
    for r in roots:
        assert p(r) == 0
    found, split = rational_roots(p)
    assert split
    assert sorted(r for r, m in found for _ in range(m)) == sorted(roots)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
@settings(max_examples=50, deadline=None)
def test_minpoly_annihilates(a, b, c, d):
    m = Matrix.from_rows([[a, b], [c, d]])
    p = minimal_polynomial(m)
    acc = Matrix.zeros(2, 2)
    power = Matrix.identity(2)
    for coeff in p.coeffs:
        acc = acc + power.scale(coeff)
        power = m * power
    assert acc.is_zero()
    assert 1 <= p.degree <= 2

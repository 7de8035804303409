from __future__ import annotations

import math
import pickle
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from adelic_brs.exactnum import (
    PADIC_INF,
    QuadReal,
    is_prime,
    left_kernel,
    padic_abs,
    padic_digits,
    padic_floor,
    padic_frac,
    padic_frac_by_digits,
    padic_val,
    primitive_integer_vector,
    quad_eval,
    quad_floor_frac,
    quad_sign,
    rational_rank,
    squarefree_decomposition,
)

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q.numerator) < 10**12)
primes = st.sampled_from([2, 3, 5, 7, 11, 13])
S2, S3 = QuadReal.sqrt(2), QuadReal.sqrt(3)


@pytest.mark.parametrize("x,p,v", [(F(5, 2), 2, -1), (F(12), 2, 2), (F(7, 6), 3, -1), (F(1, 9), 3, -2)])
def test_padic_val_examples(x, p, v):
    assert padic_val(x, p) == v


def test_padic_val_zero_is_infinite():
    assert padic_val(0, 7) is PADIC_INF
    assert PADIC_INF > 10**100 and PADIC_INF >= 0
    assert padic_abs(0, 7) == 0


@pytest.mark.parametrize("x,p,a", [(F(7, 6), 2, 2), (F(7, 6), 3, 3), (F(4), 2, F(1, 4))])
def test_padic_abs_examples(x, p, a):
    assert padic_abs(x, p) == a


@pytest.mark.parametrize("x,p,f", [(F(1, 2), 2, F(1, 2)), (F(7, 6), 3, F(2, 3)), (F(5), 3, 0),
                                   (F(-1, 2), 2, F(1, 2)), (F(1, 4), 2, F(1, 4)), (F(1, 3), 3, F(1, 3))])
def test_padic_frac_examples(x, p, f):
    assert padic_frac(x, p) == f


@pytest.mark.parametrize("x,p,fl", [(F(7, 6), 2, F(2, 3)), (F(3), 5, 3), (F(1, 2), 2, 0)])
def test_padic_floor_examples(x, p, fl):
    assert padic_floor(x, p) == fl


def test_padic_rejects_composite():
    with pytest.raises(ValueError):
        padic_val(F(1, 2), 4)
    assert is_prime(97) and not is_prime(1) and not is_prime(91)


@settings(max_examples=300)
@given(rationals, primes)
def test_padic_frac_matches_digit_expansion(x, p):
    # independent oracle: long division digit by digit
    assert padic_frac(x, p) == padic_frac_by_digits(x, p)


@settings(max_examples=200)
@given(rationals, primes)
def test_padic_digits_reconstruct(x, p):
    if x == 0:
        return
    N, digits = padic_digits(x, p, 12)
    assert N == padic_val(x, p)
    approx = sum(F(d) * F(p) ** (N + i) for i, d in enumerate(digits))
    assert padic_val(x - approx, p) >= N + 12


@settings(max_examples=300)
@given(rationals, rationals, primes)
def test_padic_properties(x, y, p):
    f = padic_frac(x, p)
    assert 0 <= f < 1
    den = f.denominator
    while den % p == 0:
        den //= p
    assert den == 1
    assert padic_val(x - f, p) >= 0
    assert (f == 0) == (padic_val(x, p) >= 0)
    assert padic_abs(x * y, p) == padic_abs(x, p) * padic_abs(y, p)
    assert padic_abs(x + y, p) <= max(padic_abs(x, p), padic_abs(y, p))


def test_squarefree_decomposition():
    assert squarefree_decomposition(12) == (2, 3)
    assert squarefree_decomposition(8) == (2, 2)
    assert QuadReal({8: 1}) == S2 * 2
    assert QuadReal.sqrt(F(1, 2)) == S2 / 2


@pytest.mark.parametrize("s,sign", [(S2 - 1, 1), (S2 + S3 - S2 - S3, 0), (3 - S2 * 2, 1),
                                    (S2 * 1000 - 1414, 1), (S2 * 1000 - 1415, -1)])
def test_quad_sign_examples(s, sign):
    assert quad_sign(s) == sign


def test_quad_sign_near_cancellation():
    # (sqrt2 + sqrt3)^2 = 5 + 2 sqrt6: a close approximant of sqrt6 stresses refinement
    p, q = 107387773379, 43840323184
    s = QuadReal.sqrt(6) * q - p
    expected = 1 if 6 * q * q > p * p else -1
    assert quad_sign(s) == expected


@pytest.mark.parametrize("s,fl,fr", [(S2, 1, S2 - 1), (QuadReal(F(-1, 5)), -1, QuadReal(F(4, 5))),
                                     (S2 * 2 + F(1, 2), 3, S2 * 2 - F(5, 2)), (QuadReal(3), 3, QuadReal(0))])
def test_quad_floor_frac_examples(s, fl, fr):
    assert quad_floor_frac(s) == (fl, fr)


def test_quad_eval_examples():
    iv = quad_eval(S2, 30)
    assert F(141421356, 10**8) <= iv.lo and iv.hi <= F(141421357, 10**8) and iv.width <= F(2) ** -29
    assert quad_eval(QuadReal(0), 50).lo == quad_eval(QuadReal(0), 50).hi == 0
    third = quad_eval(QuadReal(F(1, 3)), 10)
    assert third.contains(F(1, 3)) and third.width <= F(2) ** -9


@settings(max_examples=100)
@given(st.lists(st.tuples(st.sampled_from([1, 2, 3, 5, 6, 7, 10]),
                          st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100)), max_size=4),
       st.integers(2, 200))
def test_quad_eval_encloses_mpmath(terms, prec):
    s = QuadReal({})
    for n, c in terms:
        s = s + QuadReal.sqrt(n) * c
    iv = quad_eval(s, prec)
    assert iv.width <= F(2) ** (1 - prec)
    with mpmath.workdps(int(prec * 0.3) + 30):
        ref = sum((mpmath.mpf(c.numerator) / c.denominator) * mpmath.sqrt(n) for n, c in s.terms.items())
        assert iv.lo - F(1, 10**(int(prec * 0.3) + 20)) <= F(str(mpmath.nstr(ref, int(prec * 0.3) + 25)))
        assert F(str(mpmath.nstr(ref, int(prec * 0.3) + 25))) <= iv.hi + F(1, 10**(int(prec * 0.3) + 20))


def test_arithmetic_and_hash():
    a = S2 + S3
    assert (a * a) == 5 + QuadReal.sqrt(6) * 2
    assert QuadReal(F(3, 4)) == F(3, 4) and hash(QuadReal(F(3, 4))) == hash(F(3, 4))
    assert len({S2 - S2, QuadReal(0), 0}) == 1
    assert (S2 / 2) * 2 == S2
    with pytest.raises(TypeError):
        _ = QuadReal(1) / S2
    assert abs(-S2) == S2 and S2 > 1 and S2 < F(3, 2)


def test_string_round_trip():
    for s in (QuadReal(0), S2 / 2 + F(3, 4), S3 * -7 + QuadReal.sqrt(30) * F(1, 9)):
        assert QuadReal.from_string(s.to_string()) == s
        assert pickle.loads(pickle.dumps(s)) == s
    assert QuadReal(0).to_string() == "1:0/1"
    assert str(S2 / 2 + F(3, 4)) == "3/4 + (1/2)√2"


@pytest.mark.parametrize("M,r", [([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3), ([[1, 2], [2, 4]], 1),
                                 ([[1, 0, F(1, 2)], [0, 1, F(1, 3)], [1, 1, F(5, 6)]], 2), ([], 0)])
def test_rational_rank_examples(M, r):
    assert rational_rank(M) == r


@settings(max_examples=100)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_rank_and_kernel_oracle(m, n, data):
    M = [[F(data.draw(st.integers(-3, 3)), data.draw(st.integers(1, 3))) for _ in range(n)] for _ in range(m)]
    import sympy
    assert rational_rank(M) == sympy.Matrix(M).rank()
    K = left_kernel(M)
    assert len(K) == m - rational_rank(M)
    for c in K:
        assert all(sum(c[i] * M[i][j] for i in range(m)) == 0 for j in range(n))


def test_primitive_integer_vector():
    assert primitive_integer_vector([F(1, 2), F(-1, 3)]) == [3, -2]
    assert math.gcd(*primitive_integer_vector([F(4), F(6)])) == 1

from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from adelic_brs.adeles import (
    AdeleVector,
    GammaVector,
    PrimeSet,
    character_eval,
    character_phase,
    check_ergodic,
    diagonal_embed,
    gamma_check,
    geometric_abs_squared,
    phase_mod1,
    reduce_mod_gamma,
    theta,
    weyl_sum,
)
from adelic_brs.exactnum import QuadReal, padic_val, quad_floor_frac, rational_rank

S2, S3 = QuadReal.sqrt(2), QuadReal.sqrt(3)
P2, P3, P23 = PrimeSet.of(2), PrimeSet.of(3), PrimeSet.of(2, 3)


def test_prime_set_validation():
    assert list(PrimeSet.of(3, 2)) == [2, 3]
    with pytest.raises(ValueError):
        PrimeSet.of(2, 2)
    with pytest.raises(ValueError):
        PrimeSet.of(6)


@pytest.mark.parametrize("x,ps,ok", [(F(7, 6), (2, 3), True), (F(7, 6), (2,), False), (F(5), (2,), True)])
def test_gamma_check(x, ps, ok):
    assert gamma_check(x, ps) is ok


def test_diagonal_embed_examples():
    a = diagonal_embed(F(1, 2), P23)
    assert a.real == F(1, 2) and a.parts == (F(1, 2), F(1, 2))
    z = diagonal_embed(0, P23)
    assert z.real.is_zero() and z.parts == (0, 0)
    b = diagonal_embed(F(-5, 3), P3)
    assert b.real == F(-5, 3) and b.part(3) == F(-5, 3)
    with pytest.raises(ValueError):
        diagonal_embed(F(1, 3), P2)


def test_reduce_examples():
    x = AdeleVector.build(P2, [F(3, 10)], {2: [F(5, 2)]})
    r, shift = reduce_mod_gamma(x)
    assert r.real == (QuadReal(F(4, 5)),) and r.part(2) == (F(3),) and shift.entries == (F(-1, 2),)
    y = AdeleVector.build(P3, [S2], {3: [F(1, 3)]})
    r, shift = reduce_mod_gamma(y)
    # {1/3}_3 = 1/3 is removed first, then floor(sqrt2 - 1/3) = 1
    assert r.real == (S2 - F(4, 3),) and r.part(3) == (-1,) and shift.entries == (F(4, 3),)
    # idempotence
    r2, s2 = reduce_mod_gamma(r)
    assert r2 == r and s2.is_zero()


def small_fracs(num, den):
    return st.builds(F, st.integers(-num, num), st.integers(1, den))


coords = st.tuples(st.integers(-20, 20), small_fracs(500, 30), small_fracs(500, 72), small_fracs(500, 72))


def _point(cs):
    reals = [S2 * a + b for a, b, _, _ in cs]
    return AdeleVector.build(P23, reals, {2: [c for _, _, c, _ in cs], 3: [d for *_, d in cs]})


@settings(max_examples=150)
@given(st.lists(coords, min_size=1, max_size=3))
def test_reduce_properties(cs):
    x = _point(cs)
    r, shift = reduce_mod_gamma(x)
    assert r.in_fundamental_domain()
    for c in r.coords:
        assert 0 <= c.real < 1
        assert all(padic_val(a, p) >= 0 for p, a in zip(P23, c.parts))
    assert r + shift.embed() == x
    assert reduce_mod_gamma(r)[0] == r


def test_character_examples():
    x = AdeleVector.build(P2, [S2], {2: [F(1, 2)]})
    g1 = GammaVector(P2, (F(1),))
    assert character_phase(g1, x) == S2 - F(1, 2)
    z = character_eval(GammaVector(P2, (F(0),)), x, 80)
    assert z.re.contains(1) and z.im.contains(0)
    val = complex(character_eval(g1, x, 64))
    assert abs(val - cmath.exp(2j * math.pi * (math.sqrt(2) - 0.5))) < 1e-12
    assert abs(abs(val) - 1) < 1e-15


def test_theta_examples():
    a1 = AdeleVector.build(P2, [S2], {2: [F(1, 2)]})
    assert theta(GammaVector(P2, (F(1),)), a1) == S2 - F(1, 2)
    assert theta(GammaVector(P2, (F(0),)), a1).is_zero()
    a2 = AdeleVector.build(P2, [S2, S3], {2: [F(1, 2), 0]})
    assert theta(GammaVector(P2, (F(1), F(1))), a2) == S2 + S3 - F(1, 2)


@settings(max_examples=100)
@given(st.lists(coords, min_size=2, max_size=2), st.lists(coords, min_size=2, max_size=2),
       st.lists(st.builds(lambda n, a, b: F(n, 2**a * 3**b), st.integers(-50, 50), st.integers(0, 3),
                          st.integers(0, 3)), min_size=2, max_size=2))
def test_character_homomorphism_and_invariance(cx, cy, g):
    x, y = _point(cx), _point(cy)
    gam = GammaVector(P23, tuple(g))
    lhs = phase_mod1(gam, x + y)
    rhs = quad_floor_frac(phase_mod1(gam, x) + phase_mod1(gam, y))[1]
    assert lhs == rhs
    q = GammaVector(P23, (F(5, 4), F(-7, 9)))
    assert phase_mod1(gam, x + q.embed()) == phase_mod1(gam, x)


def _rot(d=2):
    return AdeleVector.build(P23, [S2, S3][:d], {2: [F(1, 2), F(1, 3)][:d], 3: [F(2, 3), 0][:d]})


def test_weyl_trivial_character():
    w = weyl_sum(GammaVector(P23, (0, 0)), _rot(), 50, 64)
    assert w.re.lo == w.re.hi == 1 and w.im.lo == w.im.hi == 0


def test_weyl_paths_and_closed_form():
    alpha = _rot()
    gam = GammaVector(P23, (F(1, 2), F(-3)))
    th = theta(gam, alpha)
    N = 300
    a = weyl_sum(gam, alpha, N, 100, "theta")
    b = weyl_sum(gam, alpha, N, 100, "orbit")
    assert a.overlaps(b) and a.width < F(1, 10**25)
    closed = geometric_abs_squared(th, N, 100)
    assert a.abs_squared().overlaps(closed)
    # direct float summation oracle
    t = float(th)
    direct = sum(cmath.exp(2j * math.pi * n * t) for n in range(1, N + 1)) / N
    assert abs(complex(a) - direct) < 1e-10
    bound = 1 / (N * abs(math.sin(math.pi * t)))
    assert abs(direct) <= bound + 1e-12


def test_weyl_requires_positive_N():
    with pytest.raises(ValueError):
        weyl_sum(GammaVector(P23, (1, 1)), _rot(), 0)


def test_ergodic_examples():
    assert check_ergodic([S2, S3]).ergodic
    res = check_ergodic([S2, S2 * 2 + 1])
    assert not res.ergodic and res.relation == (2, -1) and res.constant == 1
    assert res.verify([S2, S2 * 2 + 1])
    rat = check_ergodic([QuadReal(F(3, 7))])
    assert not rat.ergodic and rat.verify([QuadReal(F(3, 7))])
    assert check_ergodic(_rot()).ergodic


def test_ergodic_against_rank_oracle():
    # oracle: 1, a_1..a_d are Q-independent iff the coefficient rows over {1, sqrt n} have full rank
    rng = random.Random(11)
    basis = [1, 2, 3, 5, 6, 7]
    for _ in range(200):
        d = rng.randint(1, 3)
        rows = [[F(rng.randint(-2, 2)) for _ in basis] for _ in range(d)]
        reals = [QuadReal({n: c for n, c in zip(basis, r)}) for r in rows]
        aug = [[F(1)] + [F(0)] * (len(basis) - 1)] + rows
        expected = rational_rank(aug) == d + 1
        res = check_ergodic(reals)
        assert res.ergodic == expected
        assert res.verify(reals)

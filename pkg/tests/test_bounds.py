from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from ecfaltings.bounds import (
    RankBoundInputs, TowerMagnitude, all_constants, cor12_constants, headline_rank_constant,
    jacobian_rank_bound, max_one, prop33_constants, prop36_constants, rank_bound,
    thm11_constants, tower_compare,
)
from ecfaltings.errors import IncomparableWithinRadius
from ecfaltings.errreal import ErrReal


def neg_log(c: TowerMagnitude) -> TowerMagnitude:
    return -c.log_abs()


# -- TowerMagnitude --------------------------------------------------------

def test_c_at_g1_is_exact():
    c, c0 = thm11_constants(1)
    assert c.exact == Fraction(1, 12 ** 12)
    assert c0.exact == -12 ** 12
    with mp.workprec(128):
        assert abs(c.to_errreal().value - mpf(12) ** -12) < mpf(10) ** -30


def test_c_at_g2_tower_oracle():
    c, _ = thm11_constants(2)
    assert c.level >= 1
    # log10(-log c) = log10(12 * 2^3072 * log 24), evaluated independently
    with mp.workprec(256):
        oracle = mpmath.log10(12) + 3072 * mpmath.log10(2) + mpmath.log10(mpmath.log(24))
        got = neg_log(c).log_abs().to_errreal().value / mpmath.log(10)
        assert abs(got - oracle) < mpf(10) ** -25
        assert abs(oracle - mpf("926.3")) < mpf("0.1")


def test_normalization_top_range():
    for t in all_constants(2).values():
        if t.sign and t.level >= 1:
            assert 1 <= t.top.value < mp.e


def test_level_promotion_identity():
    five = TowerMagnitude.from_exact(5)
    lifted = TowerMagnitude.from_iterated_log(ErrReal.log_of(5, 128), 1)
    assert tower_compare(five, lifted) == 0
    assert tower_compare(lifted, five) == 0


def test_compare_self_and_order():
    c1, _ = thm11_constants(1)
    c2, _ = thm11_constants(2)
    assert tower_compare(c1, c1) == 0
    assert tower_compare(c2, c1) == -1
    assert tower_compare(c1, c2) == 1
    assert tower_compare(-c1, c2) == -1


def test_incomparable_within_radius():
    a = TowerMagnitude.from_iterated_log(ErrReal(mpf("1.5"), mpf("0.1"), 64), 2)
    b = TowerMagnitude.from_iterated_log(ErrReal(mpf("1.55"), mpf("0.1"), 64), 2)
    with pytest.raises(IncomparableWithinRadius):
        tower_compare(a, b)


@given(st.fractions(min_value=-10 ** 6, max_value=10 ** 6), st.fractions(min_value=-10 ** 6, max_value=10 ** 6))
def test_compare_agrees_with_rationals(p, q):
    a, b = TowerMagnitude.from_exact(p), TowerMagnitude.from_exact(q)
    assert tower_compare(a, b) == (p > q) - (p < q)
    # the same comparison with the exact shortcut stripped
    strip = lambda t: TowerMagnitude(t.sign, t.level, t.top, t.reciprocal)
    if p != q:
        assert tower_compare(strip(a), strip(b)) == (p > q) - (p < q)


def test_neg_log_c_strictly_increasing_in_g():
    vals = [neg_log(thm11_constants(g)[0]) for g in range(1, 7)]
    for a, b in zip(vals, vals[1:]):
        assert tower_compare(a, b) == -1


@pytest.mark.parametrize("g", [1, 2, 3])
def test_constant_relations(g):
    c, c0 = thm11_constants(g)
    c1, c2, c3 = cor12_constants(g)
    assert c2.exact == Fraction(1, 17)
    if g == 1:
        assert tower_compare(c1, c) == -1
        assert tower_compare(c3, c0) == -1
        assert c1.exact == c.exact / 17
        assert c3.exact == -1 / c1.exact
    else:
        # the factor 17 is far below the top-level radius of these towers
        assert tower_compare(c1, c) in (-1, 0)
        assert tower_compare(c3, c0) in (-1, 0)


def test_jacobian_constants_verbatim():
    c5, c6 = prop33_constants(1, jacobian=True)
    assert (c5.exact, c6.exact) == (Fraction(1, 12), 0)
    c16, c17 = prop36_constants(1, jacobian=True)
    assert (c16.exact, c17.exact) == (Fraction(1, 12 ** 5), 0)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_jacobian_c16_is_c5_over_12_power(g):
    c5, _ = prop33_constants(g, jacobian=True)
    c16, _ = prop36_constants(g, jacobian=True)
    assert c16.exact == c5.exact / Fraction(12) ** (4 * g * g)


def test_nonjacobian_prop36_at_g1():
    c5, c6 = prop33_constants(1)
    c16, c17 = prop36_constants(1)
    assert c5.exact == Fraction(1, 12 ** 12)
    assert c16.exact == c5.exact / 12 ** 4
    assert c17.exact == c6.exact


def test_headline_constant():
    assert headline_rank_constant(1, 1).exact == 12 ** 12
    assert headline_rank_constant(1, 3).exact == 27 * 12 ** 12


@pytest.mark.parametrize("g", [0, -1, 1.5])
def test_bad_dimension(g):
    with pytest.raises(ValueError):
        thm11_constants(g)


# -- rank bound ------------------------------------------------------------

def test_rank_bound_37():
    r = rank_bound(RankBoundInputs(1, 1, ErrReal.log_of(37, 128)))
    with mp.workprec(128):
        oracle = 1024 * mpmath.log(37) + 256 * mpmath.log(16)
        assert abs(r.value - oracle) <= r.err + mpf(10) ** -30
        assert abs(r.value - mpf("4407.4")) < mpf("0.1")


def test_rank_bound_trivial_conductor():
    r = rank_bound(RankBoundInputs(1, 1, ErrReal.exact(0, 128)))
    with mp.workprec(128):
        assert abs(r.value - 256 * mpmath.log(16)) < mpf(10) ** -30
        assert abs(r.value - mpf("709.8")) < mpf("0.1")


@given(st.integers(1, 10 ** 9), st.integers(1, 10 ** 9), st.integers(0, 10 ** 6))
def test_rank_bound_monotone(n1, n2, dk):
    lo, hi = sorted((n1, n2))
    disc = ErrReal.log_of(dk, 128) if dk else None
    a = rank_bound(RankBoundInputs(1, 1, ErrReal.log_of(lo, 128), disc))
    b = rank_bound(RankBoundInputs(1, 1, ErrReal.log_of(hi, 128), disc))
    assert (b - a).upper >= 0
    c = rank_bound(RankBoundInputs(1, 1, ErrReal.log_of(lo, 128), ErrReal.log_of(dk + 1, 128)))
    assert (c - a).upper >= 0


def test_jacobian_rank_bound():
    inputs = RankBoundInputs(1, 1, ErrReal.exact(0, 128))
    with mp.workprec(128):
        base = 48 * 256 * 12 ** 4 + 256 * mpmath.log(16)
        r = jacobian_rank_bound(inputs, ErrReal.exact(Fraction(1, 2), 128))
        assert abs(r.value - base) < mpf(10) ** -25
        r = jacobian_rank_bound(inputs, ErrReal.exact(3, 128))
        assert abs(r.value - (base + 2 * 48 * 256 * 12 ** 4)) < mpf(10) ** -20


def test_max_one_straddling_ball():
    b = max_one(ErrReal(mpf("0.99"), mpf("0.02"), 64))
    assert b.lower <= 1 <= b.upper
    assert b.lower >= 1 - mpf(10) ** -12
    assert max_one(ErrReal.exact(-5, 64)).value == 1


def test_rank_bound_inputs_validation():
    with pytest.raises(ValueError):
        RankBoundInputs(0, 1, ErrReal.exact(0, 64))
    with pytest.raises(ValueError):
        RankBoundInputs(1, 1, ErrReal.exact(-1, 64))

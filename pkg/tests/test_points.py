from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ecfaltings.errors import NotOnCurve
from ecfaltings.points import (O, CurvePoint, check_on_curve, linear_combination, point_add,
                               point_mul, point_neg, torsion_order, torsion_points)

from conftest import curve

E37 = curve(0, 0, 1, -1, 0).curve
P37 = CurvePoint.of(0, 0)


def test_identity_and_inverse():
    assert point_add(E37, P37, O) == P37 == point_add(E37, O, P37)
    assert point_add(E37, P37, point_neg(E37, P37)) == O


def test_duplication_on_37a1():
    assert point_mul(E37, 2, P37) == CurvePoint.of(1, 0)


def test_multiples_of_37a1_generator():
    # x-coordinates of nP for n = 1..6, from exact chord-tangent iteration by hand
    xs = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 4), Fraction(6)]
    assert [point_mul(E37, n, P37).x for n in range(1, 7)] == xs


def test_off_curve_point_rejected():
    with pytest.raises(NotOnCurve):
        check_on_curve(E37, CurvePoint.of(1, 1))


def test_torsion_order_identity_is_one():
    assert torsion_order(E37, O) == 1


def test_torsion_order_six_on_x3_plus_1():
    E = curve(0, 0, 0, 0, 1).curve
    assert torsion_order(E, CurvePoint.of(0, 1)) == 3
    assert torsion_order(E, CurvePoint.of(2, 3)) == 6
    assert torsion_order(E, CurvePoint.of(-1, 0)) == 2
    assert len(torsion_points(E)) == 6


def test_non_torsion_point():
    assert torsion_order(E37, P37) is None


@pytest.mark.parametrize("ainvs, order", [
    ((0, 0, 1, -1, 0), 1), ((0, -1, 1, -10, -20), 5), ((0, 0, 0, -1, 0), 4),
    ((0, 0, 0, 0, 1), 6), ((1, 0, 1, 4, -6), 6), ((1, 1, 1, -10, -10), 8),
])
def test_torsion_subgroup_sizes(ainvs, order):
    T = torsion_points(curve(*ainvs).curve)
    assert len(T) == order and O in T


def test_torsion_points_form_a_group():
    E = curve(1, 1, 1, -10, -10).curve
    T = set(torsion_points(E))
    assert all(point_add(E, a, b) in T for a in T for b in T)


def test_linear_combination():
    E = curve(0, 1, 1, -2, 0).curve
    P, Q = CurvePoint.of(-1, 1), CurvePoint.of(0, 0)
    R = linear_combination(E, (2, -3), (P, Q))
    assert R == point_add(E, point_mul(E, 2, P), point_mul(E, -3, Q))


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_point_mul_is_additive(m, n):
    E = curve(0, 1, 1, -2, 0).curve
    P = CurvePoint.of(-1, 1)
    assert point_mul(E, m + n, P) == point_add(E, point_mul(E, m, P), point_mul(E, n, P))


@given(st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8))
def test_group_law_is_associative(a, b, c):
    E = curve(0, 0, 1, -7, 6).curve
    P, Q, R = CurvePoint.of(0, 2), CurvePoint.of(1, 0), CurvePoint.of(2, 0)
    X, Y, Z = point_mul(E, a, P), point_mul(E, b, Q), point_mul(E, c, R)
    assert point_add(E, point_add(E, X, Y), Z) == point_add(E, X, point_add(E, Y, Z))

"""Exact chord-tangent group law and torsion on Weierstrass curves over Q."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import arith
from .curve import Transform, WeierstrassCurve, as_fraction, invariants
from .errors import NotOnCurve

MAZUR_BOUND = 12


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y), or the point at infinity when ``x is None``."""

    x: Fraction | None = None
    y: Fraction | None = None

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls()

    @classmethod
    def of(cls, x, y) -> "CurvePoint":
        return cls(as_fraction(x), as_fraction(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


O = CurvePoint.infinity()


def on_curve(E: WeierstrassCurve, P: CurvePoint) -> bool:
    return P.is_infinity or E.contains(P.x, P.y)


def check_on_curve(E: WeierstrassCurve, P: CurvePoint) -> CurvePoint:
    if not on_curve(E, P):
        raise NotOnCurve(f"{P} is not on {E}")
    return P


def point_neg(E: WeierstrassCurve, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, -P.y - E.a1 * P.x - E.a3)


def point_add(E: WeierstrassCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a1, a2, a3, a4, a6 = E.ainvs
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return O
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(x3, y3)


def point_sub(E, P, Q):
    return point_add(E, P, point_neg(E, Q))


def point_mul(E: WeierstrassCurve, n: int, P: CurvePoint) -> CurvePoint:
    """n*P by double-and-add; negative n allowed."""
    if n < 0:
        return point_mul(E, -n, point_neg(E, P))
    R = O
    while n:
        if n & 1:
            R = point_add(E, R, P)
        P = point_add(E, P, P)
        n >>= 1
    return R


def linear_combination(E: WeierstrassCurve, coeffs, points) -> CurvePoint:
    R = O
    for n, P in zip(coeffs, points):
        if n:
            R = point_add(E, R, point_mul(E, n, P))
    return R


def torsion_order(E: WeierstrassCurve, P: CurvePoint) -> int | None:
    """Order of P if it is at most 12 (Mazur), else None for non-torsion."""
    Q = P
    for n in range(1, MAZUR_BOUND + 1):
        if Q.is_infinity:
            return n
        Q = point_add(E, Q, P)
    return None


def is_torsion(E, P) -> bool:
    return torsion_order(E, P) is not None


def _short_model(E: WeierstrassCurve) -> tuple[WeierstrassCurve, Transform]:
    # y^2 = x^3 - 27 c4 x - 54 c6 over Z, reached by u = 1/6.
    T = Transform(Fraction(1, 6), -E.b2 / 12, -E.a1 / 2, -(E.a3 - E.a1 * E.b2 / 12) / 2)
    S = T.apply(E)
    if (S.a1, S.a2, S.a3) != (0, 0, 0):
        raise ArithmeticError("short model reduction failed")
    return S, T


def _integer_roots_of_cubic(A: int, B: int) -> list[int]:
    """Integer roots of x^3 + A x + B."""
    roots = mpmath.polyroots([1, 0, A, B], maxsteps=200, extraprec=4 * (abs(A) + abs(B)).bit_length() + 60)
    out = set()
    for r in roots:
        if abs(mpmath.im(r)) > 0.5:
            continue
        base = int(mpmath.nint(mpmath.re(r)))
        for c in (base - 1, base, base + 1):
            if c ** 3 + A * c + B == 0:
                out.add(c)
    return sorted(out)


def torsion_points(E: WeierstrassCurve) -> list[CurvePoint]:
    """All rational torsion points, O first (Nagell-Lutz on a short model)."""
    S, T = _short_model(E)
    if not S.is_integral():
        D = math.lcm(*(a.denominator for a in S.ainvs))
        scale = Transform(Fraction(1, D))
        S, T = scale.apply(S), T.compose(scale)
    A, B = int(S.a4), int(S.a6)
    D = abs(4 * A ** 3 + 27 * B * B)
    ys = [1]
    for p, e in arith.factorize(D).items():
        ys = [y * p ** k for y in ys for k in range(e // 2 + 1)]
    found = [O]
    for y0 in [0] + sorted(ys):
        for x in _integer_roots_of_cubic(A, B - y0 * y0):
            for y in {y0, -y0}:
                P = CurvePoint(Fraction(x), Fraction(y))
                if torsion_order(S, P) is not None:
                    Q = CurvePoint(*T.unmap_xy(P.x, P.y))
                    if Q not in found:
                        found.append(Q)
    return [found[0]] + sorted(found[1:], key=lambda P: (P.x, P.y))


__all__ = [
    "CurvePoint", "O", "on_curve", "check_on_curve", "point_add", "point_neg",
    "point_sub", "point_mul", "linear_combination", "torsion_order", "is_torsion",
    "torsion_points", "invariants",
]

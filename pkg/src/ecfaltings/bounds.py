"""Explicit constants (exponent towers) and the explicit rank bound.

A TowerMagnitude stores sign * exp^level(top), or its reciprocal when
``reciprocal`` is set (used for the tiny constants such as (12g)^(-...)).
Normalization: level >= 1 forces top in [1, e); level 0 covers [1/e, e).
Integer exponents such as 12 g^(4g) stay exact; floating point only enters
at the top of the tower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import IncomparableWithinRadius
from .errreal import ErrReal

DEFAULT_PREC = 128
# exact evaluation of B^K is attempted below this many bits
EXACT_BITS_LIMIT = 1 << 17


@dataclass(frozen=True)
class TowerMagnitude:
    sign: int
    level: int
    top: ErrReal
    reciprocal: bool = False
    exact: Fraction | None = None

    # -- construction ------------------------------------------------------
    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> "TowerMagnitude":
        return cls(0, 0, ErrReal.exact(0, prec), False, Fraction(0))

    @classmethod
    def from_exact(cls, q, prec: int = DEFAULT_PREC) -> "TowerMagnitude":
        q = Fraction(q)
        if q == 0:
            return cls.zero(prec)
        sign = 1 if q > 0 else -1
        a = abs(q)
        if a < 1 and 1 / a >= math.e:
            t = cls._from_log(ErrReal.log_of(1 / a, prec), 1, True)
        else:
            t = cls(1, 0, ErrReal.exact(a, prec)).normalized()
        return replace(t, sign=sign, exact=q)

    @classmethod
    def _from_log(cls, log_mag: ErrReal, sign: int, reciprocal: bool) -> "TowerMagnitude":
        return cls(sign, 1, log_mag, reciprocal).normalized()

    @classmethod
    def from_iterated_log(cls, value: ErrReal, depth: int, sign: int = 1,
                          reciprocal: bool = False) -> "TowerMagnitude":
        """The magnitude M with log^depth(M) = value."""
        return cls(sign, depth, value, reciprocal).normalized()

    def normalized(self) -> "TowerMagnitude":
        if self.sign == 0:
            return self
        level, top = self.level, self.top
        e = mp.e
        while top.value >= e:
            top = top.log()
            level += 1
        while level > 0 and top.value < 1:
            top = top.exp()
            level -= 1
        rec = self.reciprocal
        if rec and level == 0:
            top, rec = 1 / top, False
        return TowerMagnitude(self.sign, level, top, rec, self.exact)

    # -- derived values ----------------------------------------------------
    def __neg__(self) -> "TowerMagnitude":
        return replace(self, sign=-self.sign, exact=-self.exact if self.exact is not None else None)

    def log_abs(self) -> "TowerMagnitude":
        """log |x| as a TowerMagnitude."""
        if self.sign == 0:
            raise ValueError("log of zero")
        if self.level == 0:
            v = self.top.log()
            if v.excludes_zero():
                return TowerMagnitude(1 if v.value > 0 else -1, 0, abs(v)).normalized()
            return TowerMagnitude(0, 0, v)
        return TowerMagnitude(-1 if self.reciprocal else 1, self.level - 1, self.top).normalized()

    def to_errreal(self) -> ErrReal:
        """The value as a ball; OverflowError when the tower is too tall."""
        if self.exact is not None:
            return ErrReal.exact(self.exact, self.top.prec)
        v = self.top
        for _ in range(self.level):
            if v.value > 2 ** 40:
                raise OverflowError(f"{self} does not fit in a floating-point exponent")
            v = v.exp()
        if self.reciprocal:
            v = 1 / v
        return v * self.sign

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        s = "+" if self.sign > 0 else "-"
        body = f"exp^{self.level}({mpmath.nstr(self.top.value, 20, strip_zeros=False)})"
        return s + body + ("^-1" if self.reciprocal else "")


def _lift(top: ErrReal, k: int) -> ErrReal | None:
    """log^k(top), or None once the value drops to <= 1 (so log^k would be <= 0)."""
    for _ in range(k):
        if top.upper <= 1:
            return None
        if top.lower <= 0:
            raise IncomparableWithinRadius("tower top too uncertain to lift")
        top = top.log()
    return top


def _cmp_balls(a: ErrReal, b: ErrReal) -> int:
    if a.upper < b.lower:
        return -1
    if a.lower > b.upper:
        return 1
    prec = min(a.prec, b.prec)
    with mp.workprec(64):
        tiny = mpf(2) ** (20 - prec) * max(1, abs(a.value), abs(b.value))
    if a.err <= tiny and b.err <= tiny:
        return 0
    raise IncomparableWithinRadius(f"{a!r} and {b!r} overlap")


def _cmp_towers(la: int, ta: ErrReal, lb: int, tb: ErrReal) -> int:
    if la < lb:
        return -_cmp_towers(lb, tb, la, ta)
    lifted = _lift(tb, la - lb)
    if lifted is None:
        return 1
    return _cmp_balls(ta, lifted)


def _cmp_positive(a: TowerMagnitude, b: TowerMagnitude) -> int:
    if a.reciprocal != b.reciprocal:
        # reciprocal towers are <= 1/e, the others >= 1/e
        return -1 if a.reciprocal else 1
    c = _cmp_towers(a.level, a.top, b.level, b.top)
    return -c if a.reciprocal else c


def tower_compare(a: TowerMagnitude, b: TowerMagnitude) -> int:
    """-1, 0 or 1; IncomparableWithinRadius when the radii do not decide."""
    if a.exact is not None and b.exact is not None:
        return (a.exact > b.exact) - (a.exact < b.exact)
    if a.sign != b.sign:
        return (a.sign > b.sign) - (a.sign < b.sign)
    if a.sign == 0:
        return 0
    c = _cmp_positive(a, b)
    return c if a.sign > 0 else -c


def _power_magnitude(base: int, k_log: ErrReal, k_exact: int | None,
                     factor: Fraction, reciprocal: bool, prec: int) -> TowerMagnitude:
    """M = base^K * factor (or 1/M), where log K = k_log."""
    if k_exact is not None and k_exact * base.bit_length() <= EXACT_BITS_LIMIT:
        M = Fraction(base) ** k_exact * factor
        return TowerMagnitude.from_exact(1 / M if reciprocal else M, prec)
    # log log M = log K + log log base + log1p(log factor / (K log base))
    ll = k_log + ErrReal.log_of(base, prec).log()
    lf = abs(ErrReal.log_of(factor, prec)) if factor != 1 else None
    if lf is not None:
        with mp.workprec(64):
            # |log1p(t)| <= 2|t| for |t| <= 1/2
            t = lf.upper * mp.exp(-k_log.lower) / mp.log(base) * 2
        ll = ErrReal(ll.value, ll.err + t, prec)
    return TowerMagnitude.from_iterated_log(ll, 2, 1, reciprocal)


def _exponent(g: int, inner: int, prec: int) -> tuple[ErrReal, int | None]:
    """K = 12 g^(12 g^(inner)) as (log K, exact K or None)."""
    E = 12 * g ** inner          # exact big integer
    k_log = ErrReal.log_of(12, prec) + ErrReal.log_of(g, prec) * E
    if g == 1:
        return k_log, 12
    exact = 12 * g ** E if E * g.bit_length() <= EXACT_BITS_LIMIT else None
    return k_log, exact


def _check_g(g: int):
    if not isinstance(g, int) or g < 1:
        raise ValueError(f"dimension g must be a positive integer, got {g!r}")


def thm11_constants(g: int, prec: int = DEFAULT_PREC):
    """(c, c0) with c = (12g)^(-12 g^(12 g^(4g))) and c0 = -1/c."""
    _check_g(g)
    k_log, k = _exponent(g, 4 * g, prec)
    c = _power_magnitude(12 * g, k_log, k, Fraction(1), True, prec)
    c0 = -_power_magnitude(12 * g, k_log, k, Fraction(1), False, prec)
    return c, c0


def cor12_constants(g: int, prec: int = DEFAULT_PREC):
    """(c1, c2, c3) = (c/17, 1/17, -1/c1)."""
    _check_g(g)
    k_log, k = _exponent(g, 4 * g, prec)
    c1 = _power_magnitude(12 * g, k_log, k, Fraction(17), True, prec)
    c3 = -_power_magnitude(12 * g, k_log, k, Fraction(17), False, prec)
    return c1, TowerMagnitude.from_exact(Fraction(1, 17), prec), c3


def prop33_constants(g: int, jacobian: bool = False, prec: int = DEFAULT_PREC):
    """(c5, c6): (12g)^(-12 g^(12 g^(3g))) and -1/c5; (1/12, 0) for jacobians."""
    _check_g(g)
    if jacobian:
        return TowerMagnitude.from_exact(Fraction(1, 12), prec), TowerMagnitude.zero(prec)
    k_log, k = _exponent(g, 3 * g, prec)
    c5 = _power_magnitude(12 * g, k_log, k, Fraction(1), True, prec)
    c6 = -_power_magnitude(12 * g, k_log, k, Fraction(1), False, prec)
    return c5, c6


def prop36_constants(g: int, jacobian: bool = False, prec: int = DEFAULT_PREC):
    """(c16, c17) = (c5 / 12^(4g^2), c6); (1/12^(4g^2+1), 0) for jacobians."""
    _check_g(g)
    scale = Fraction(12) ** (4 * g * g)
    if jacobian:
        return TowerMagnitude.from_exact(1 / (12 * scale), prec), TowerMagnitude.zero(prec)
    k_log, k = _exponent(g, 3 * g, prec)
    c16 = _power_magnitude(12 * g, k_log, k, scale, True, prec)
    _, c17 = prop33_constants(g, False, prec)
    return c16, c17


def headline_rank_constant(g: int, d: int, prec: int = DEFAULT_PREC) -> TowerMagnitude:
    """c4 = (12g)^(12 g^(12 g^(4g))) d^3."""
    _check_g(g)
    k_log, k = _exponent(g, 4 * g, prec)
    return _power_magnitude(12 * g, k_log, k, Fraction(d) ** 3, False, prec)


def all_constants(g: int, prec: int = DEFAULT_PREC) -> dict[str, TowerMagnitude]:
    c, c0 = thm11_constants(g, prec)
    c1, c2, c3 = cor12_constants(g, prec)
    c5, c6 = prop33_constants(g, False, prec)
    c5j, c6j = prop33_constants(g, True, prec)
    c16, c17 = prop36_constants(g, False, prec)
    c16j, c17j = prop36_constants(g, True, prec)
    return {"c": c, "c0": c0, "c1": c1, "c2": c2, "c3": c3,
            "c4(d=1)": headline_rank_constant(g, 1, prec),
            "c5": c5, "c6": c6, "c5_jacobian": c5j, "c6_jacobian": c6j,
            "c16": c16, "c17": c17, "c16_jacobian": c16j, "c17_jacobian": c17j}


@dataclass(frozen=True)
class RankBoundInputs:
    g: int
    d: int
    log_N0: ErrReal
    log_abs_disc_K: ErrReal | None = None

    def __post_init__(self):
        if self.g < 1 or self.d < 1:
            raise ValueError("g and d must be positive")
        if self.log_N0.upper < 0 or (self.log_abs_disc_K is not None and self.log_abs_disc_K.upper < 0):
            raise ValueError("logarithmic inputs must be non-negative")

    @property
    def disc_term(self) -> ErrReal:
        return self.log_abs_disc_K if self.log_abs_disc_K is not None else ErrReal.exact(0, self.log_N0.prec)


def rank_bound(inputs: RankBoundInputs) -> ErrReal:
    """4 g^3 d^2 2^(8g^2) log N0 + g d 2^(8g^2) (log|disc K| + g^2 d^2 log 16)."""
    g, d = inputs.g, inputs.d
    prec = inputs.log_N0.prec
    w = 2 ** (8 * g * g)
    log16 = ErrReal.log_of(16, prec)
    return (inputs.log_N0 * (4 * g ** 3 * d * d * w)
            + (inputs.disc_term + log16 * (g * g * d * d)) * (g * d * w))


def jacobian_rank_bound(inputs: RankBoundInputs, hF_plus: ErrReal) -> ErrReal:
    """48 g^3 d^3 2^(8g^2) 12^(4g^2) max{1, hF+} + g d 2^(8g^2) log|disc K| + g^3 d^3 2^(8g^2) log 16."""
    g, d = inputs.g, inputs.d
    prec = hF_plus.prec
    w = 2 ** (8 * g * g)
    return (max_one(hF_plus) * (48 * g ** 3 * d ** 3 * w * 12 ** (4 * g * g))
            + inputs.disc_term * (g * d * w)
            + ErrReal.log_of(16, prec) * (g ** 3 * d ** 3 * w))


def _ball_max_one(x: ErrReal) -> ErrReal:
    lo, hi = max(mpf(1), x.lower), max(mpf(1), x.upper)
    with mp.workprec(x.prec + 8):
        return ErrReal((lo + hi) / 2, (hi - lo) / 2 * (1 + mpf(2) ** -40), x.prec)


def max_one(x: ErrReal) -> ErrReal:
    """max{1, x} as a ball."""
    if x.lower >= 1:
        return x
    if x.upper <= 1:
        return ErrReal.exact(1, x.prec)
    return _ball_max_one(x)

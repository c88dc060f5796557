"""Midpoint-radius ("ball") arithmetic on top of mpmath.

An :class:`ErrReal` is a midpoint ``value`` computed at ``prec`` bits together
with a radius ``err`` such that the true quantity lies in
``[value - err, value + err]``. Every operation adds the propagated input
radii and a bound for its own rounding error. Radii are themselves computed
with upward rounding at a fixed low precision so they never shrink.

:class:`ErrComplex` is the complex analogue with a disc of radius ``err``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, TypeVar

import mpmath
from mpmath import libmp, mp, mpf

from .errors import IntervalContainsZero, PrecisionExhausted

_RAD_PREC = 64
T = TypeVar("T")


def _up(x) -> mpf:
    return mp.fadd(x, 0, prec=_RAD_PREC, rounding="u")


def _add_up(*xs) -> mpf:
    s = mpf(0)
    for x in xs:
        s = mp.fadd(s, x, prec=_RAD_PREC, rounding="u")
    return s


def _mul_up(*xs) -> mpf:
    s = mpf(1)
    for x in xs:
        s = mp.fmul(s, x, prec=_RAD_PREC, rounding="u")
    return s


def _div_up(a, b) -> mpf:
    return mp.fdiv(a, b, prec=_RAD_PREC, rounding="u")


def _sub_down(a, b) -> mpf:
    return mp.fsub(a, b, prec=_RAD_PREC, rounding="d")


def exact_mpf(x) -> mpf:
    """x as an mpf without rounding (mpf() rounds to the global precision)."""
    if isinstance(x, mpf):
        return x
    if isinstance(x, int):
        return mp.make_mpf(libmp.from_int(x))
    return mpf(x)


def exact_mpc(re, im=0) -> mpmath.mpc:
    return mp.make_mpc((exact_mpf(re)._mpf_, exact_mpf(im)._mpf_))


def to_fraction(x: mpf) -> Fraction:
    """The exact rational value of a finite mpf."""
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:
            raise ValueError("not a finite number")
        return Fraction(0)
    man, exp = (-int(man) if sign else int(man)), int(exp)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def _neg(x):
    """Exact negation (mpmath's unary minus rounds to the global precision)."""
    if isinstance(x, mpmath.mpc):
        return exact_mpc(mp.fneg(x.real, exact=True), mp.fneg(x.imag, exact=True))
    return mp.fneg(x, exact=True)


def _fabs(x: mpf) -> mpf:
    return x if x >= 0 else mp.fneg(x, exact=True)


def _abs_down(x) -> mpf:
    if isinstance(x, mpmath.mpc):
        with mp.workprec(_RAD_PREC):
            return mp.fmul(abs(x), 1 - mpf(2) ** (4 - _RAD_PREC), prec=_RAD_PREC, rounding="d")
    return mp.fadd(_fabs(x), 0, prec=_RAD_PREC, rounding="d")


def _abs_up(x) -> mpf:
    if isinstance(x, mpmath.mpc):
        with mp.workprec(_RAD_PREC):
            return _mul_up(abs(x), 1 + mpf(2) ** (4 - _RAD_PREC))
    return _up(_fabs(x))


def _ulp(x, prec: int, k: int = 1) -> mpf:
    """Bound on the rounding error of a result ``x`` computed at ``prec`` bits."""
    return _mul_up(_abs_up(x), mpf(2) ** (k - prec))


def _round_exact(x, prec: int) -> tuple[mpf, mpf]:
    """Midpoint of an int/Fraction at ``prec`` bits and the rounding error."""
    x = Fraction(x)
    with mp.workprec(prec):
        v = mpf(x.numerator) / x.denominator if x.denominator != 1 else mpf(x.numerator)
    if _is_exact(v, x):
        return v, mpf(0)
    return v, _ulp(v, prec)


def _is_exact(v: mpf, x: Fraction) -> bool:
    return to_fraction(v) == x


class ErrReal:
    """Real ball: ``value`` +/- ``err`` at ``prec`` bits of working precision."""

    __slots__ = ("value", "err", "prec")

    def __init__(self, value, err=0, prec: int = 128):
        self.value = exact_mpf(value)
        self.err = _up(err)
        self.prec = int(prec)
        if not mpmath.isfinite(self.err):
            raise PrecisionExhausted("non-finite error radius")

    @classmethod
    def exact(cls, x, prec: int = 128) -> "ErrReal":
        v, e = _round_exact(x, prec)
        return cls(v, e, prec)

    @classmethod
    def pi(cls, prec: int = 128) -> "ErrReal":
        with mp.workprec(prec):
            v = +mp.pi
        return cls(v, _ulp(v, prec), prec)

    @classmethod
    def log_of(cls, n, prec: int = 128) -> "ErrReal":
        """log of a positive exact rational."""
        n = Fraction(n)
        if n <= 0:
            raise IntervalContainsZero(f"log of non-positive {n}")
        with mp.workprec(prec + 10):
            v = mp.log(mpf(n.numerator)) - mp.log(mpf(n.denominator))
        with mp.workprec(prec):
            v = +v
        return cls(v, _ulp(v, prec, 3) + mpf(2) ** (-prec - 4), prec)

    # -- queries ---------------------------------------------------------
    @property
    def lower(self) -> mpf:
        return mp.fsub(self.value, self.err, prec=self.prec + 8, rounding="d")

    @property
    def upper(self) -> mpf:
        return mp.fadd(self.value, self.err, prec=self.prec + 8, rounding="u")

    def contains(self, x) -> bool:
        if isinstance(x, ErrReal):
            x = x.value
        if isinstance(x, Fraction):
            with mp.workprec(self.prec + 64):
                return abs(mpf(x.numerator) / x.denominator - self.value) <= self.err * (1 + mpf(2) ** -40)
        with mp.workprec(max(self.prec, getattr(x, "prec", 53)) + 16):
            return abs(mpf(x) - self.value) <= self.err

    def overlaps(self, other: "ErrReal") -> bool:
        with mp.workprec(max(self.prec, other.prec) + 16):
            return abs(self.value - other.value) <= _add_up(self.err, other.err)

    def is_positive(self) -> bool:
        return self.lower > 0

    def is_negative(self) -> bool:
        return self.upper < 0

    def excludes_zero(self) -> bool:
        return self.is_positive() or self.is_negative()

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"ErrReal({mpmath.nstr(self.value, 20)} +/- {mpmath.nstr(self.err, 3)}, {self.prec}b)"

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "ErrReal":
        if isinstance(other, ErrReal):
            return other
        if isinstance(other, (int, Fraction)):
            return ErrReal.exact(other, self.prec)
        if isinstance(other, mpf):
            return ErrReal(other, 0, self.prec)
        return NotImplemented

    def __neg__(self):
        return ErrReal(_neg(self.value), self.err, self.prec)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        v = mp.fadd(self.value, other.value, prec=p)
        return ErrReal(v, _add_up(self.err, other.err, _ulp(v, p)), p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        v = mp.fmul(self.value, other.value, prec=p)
        e = _add_up(_mul_up(_abs_up(self.value), other.err),
                    _mul_up(_abs_up(other.value), self.err),
                    _mul_up(self.err, other.err), _ulp(v, p))
        return ErrReal(v, e, p)

    __rmul__ = __mul__

    def reciprocal(self) -> "ErrReal":
        low = _sub_down(_abs_down(self.value), self.err)
        if low <= 0:
            raise IntervalContainsZero(f"division by {self!r}")
        v = mp.fdiv(1, self.value, prec=self.prec)
        denom = mp.fmul(_abs_down(self.value), low, prec=_RAD_PREC, rounding="d")
        e = _add_up(_div_up(self.err, denom), _ulp(v, self.prec))
        return ErrReal(v, e, self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.err == 0:
            if other.value == 0:
                raise IntervalContainsZero("division by exact zero")
            p = max(self.prec, other.prec)
            v = mp.fdiv(self.value, other.value, prec=p)
            e = _add_up(_div_up(self.err, _abs_down(other.value)), _ulp(v, p))
            return ErrReal(v, e, p)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ErrReal.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return ErrReal(_fabs(self.value), self.err, self.prec)

    def sqr(self) -> "ErrReal":
        return self * self

    def ldexp(self, k: int) -> "ErrReal":
        """Exact multiplication by 2^k."""
        return ErrReal(mp.ldexp(self.value, k), mp.ldexp(self.err, k), self.prec)

    def with_prec(self, prec: int) -> "ErrReal":
        return ErrReal(self.value, self.err, prec)

    # -- elementary functions -------------------------------------------
    def log(self) -> "ErrReal":
        low = _sub_down(self.value, self.err)
        if low <= 0:
            raise IntervalContainsZero(f"log of {self!r}")
        with mp.workprec(self.prec):
            v = mp.log(self.value)
        return ErrReal(v, _add_up(_div_up(self.err, low), _ulp(v, self.prec, 3),
                                  mpf(2) ** (-self.prec - 2)), self.prec)

    def exp(self) -> "ErrReal":
        with mp.workprec(self.prec):
            v = mp.exp(self.value)
        with mp.workprec(_RAD_PREC):
            grow = mp.expm1(self.err) * (1 + mpf(2) ** -50)
        return ErrReal(v, _add_up(_mul_up(_abs_up(v), grow), _ulp(v, self.prec, 3)), self.prec)

    def sqrt(self) -> "ErrReal":
        low = _sub_down(self.value, self.err)
        if low < 0:
            raise IntervalContainsZero(f"sqrt of {self!r}")
        with mp.workprec(self.prec):
            v = mp.sqrt(self.value)
        if self.err == 0:
            return ErrReal(v, _ulp(v, self.prec), self.prec)
        with mp.workprec(_RAD_PREC):
            root_low = mp.sqrt(low) * (1 - mpf(2) ** -60)
            vlow = _abs_down(v)
        # |sqrt(x+d) - sqrt(x)| = |d| / (sqrt(x+d) + sqrt(x))
        e = _div_up(self.err, mp.fadd(root_low, vlow, prec=_RAD_PREC, rounding="d"))
        return ErrReal(v, _add_up(e, _ulp(v, self.prec)), self.prec)

    def atan2(self, x: "ErrReal") -> "ErrReal":
        """atan2(self, x) with self > 0, a value in (0, pi)."""
        if not self.is_positive():
            raise IntervalContainsZero("atan2 requires a positive first argument")
        p = max(self.prec, x.prec)
        with mp.workprec(p):
            v = mp.atan2(self.value, x.value)
        # gradient norm is 1/r with r the distance to the origin
        r = _sub_down(_abs_down(self.value), self.err)
        e = _div_up(_add_up(self.err, x.err), r)
        return ErrReal(v, _add_up(e, _ulp(v, p, 3)), p)

    def asin(self) -> "ErrReal":
        """arcsin on [0, 1); the ball must stay below 1."""
        hi = self.upper
        if hi >= 1:
            raise PrecisionExhausted("asin argument too close to 1")
        with mp.workprec(self.prec):
            v = mp.asin(self.value)
        with mp.workprec(_RAD_PREC):
            deriv = 1 / mp.sqrt((1 - hi) * (1 + hi)) * (1 + mpf(2) ** -50)
        return ErrReal(v, _add_up(_mul_up(self.err, deriv), _ulp(v, self.prec, 3)), self.prec)

    def floor(self) -> int:
        with mp.workprec(self.prec + 16):
            lo, hi = mp.floor(self.lower), mp.floor(self.upper)
        if lo != hi:
            raise PrecisionExhausted(f"floor of {self!r} is ambiguous")
        return int(lo)


def _as_mpc(z) -> mpmath.mpc:
    return z if isinstance(z, mpmath.mpc) else exact_mpc(z)


class ErrComplex:
    """Complex ball: ``value`` within Euclidean distance ``err``."""

    __slots__ = ("value", "err", "prec")

    def __init__(self, value, err=0, prec: int = 128):
        self.value = _as_mpc(value)
        self.err = _up(err)
        self.prec = int(prec)
        if not mpmath.isfinite(self.err):
            raise PrecisionExhausted("non-finite error radius")

    @classmethod
    def from_parts(cls, re: ErrReal, im: ErrReal | None = None) -> "ErrComplex":
        if im is None:
            return cls(exact_mpc(re.value), re.err, re.prec)
        p = max(re.prec, im.prec)
        return cls(exact_mpc(re.value, im.value), _add_up(re.err, im.err), p)

    @classmethod
    def exact(cls, x, prec: int = 128) -> "ErrComplex":
        return cls.from_parts(ErrReal.exact(x, prec))

    @property
    def real(self) -> ErrReal:
        return ErrReal(self.value.real, self.err, self.prec)

    @property
    def imag(self) -> ErrReal:
        return ErrReal(self.value.imag, self.err, self.prec)

    def abs(self) -> ErrReal:
        with mp.workprec(self.prec):
            v = abs(self.value)
        return ErrReal(v, _add_up(self.err, _ulp(v, self.prec, 2)), self.prec)

    def conj(self) -> "ErrComplex":
        v = self.value
        return ErrComplex(exact_mpc(v.real, mp.fneg(v.imag, exact=True)), self.err, self.prec)

    def __repr__(self):
        return f"ErrComplex({mpmath.nstr(self.value, 20)} +/- {mpmath.nstr(self.err, 3)}, {self.prec}b)"

    def _coerce(self, other) -> "ErrComplex":
        if isinstance(other, ErrComplex):
            return other
        if isinstance(other, ErrReal):
            return ErrComplex.from_parts(other)
        if isinstance(other, (int, Fraction)):
            return ErrComplex.exact(other, self.prec)
        if isinstance(other, (mpf, mpmath.mpc)):
            return ErrComplex(other, 0, self.prec)
        return NotImplemented

    def __neg__(self):
        return ErrComplex(_neg(self.value), self.err, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        with mp.workprec(p):
            v = self.value + other.value
        return ErrComplex(v, _add_up(self.err, other.err, _ulp(v, p, 2)), p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        with mp.workprec(p):
            v = self.value * other.value
        e = _add_up(_mul_up(_abs_up(self.value), other.err),
                    _mul_up(_abs_up(other.value), self.err),
                    _mul_up(self.err, other.err), _ulp(v, p, 3))
        return ErrComplex(v, e, p)

    __rmul__ = __mul__

    def reciprocal(self) -> "ErrComplex":
        mag = _abs_down(self.value)
        low = _sub_down(mag, self.err)
        if low <= 0:
            raise IntervalContainsZero(f"division by {self!r}")
        with mp.workprec(self.prec):
            v = 1 / self.value
        e = _div_up(self.err, mp.fmul(mag, low, prec=_RAD_PREC, rounding="d"))
        return ErrComplex(v, _add_up(e, _ulp(v, self.prec, 3)), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ErrComplex.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> "ErrComplex":
        with mp.workprec(self.prec):
            v = mp.exp(self.value)
        with mp.workprec(_RAD_PREC):
            grow = mp.expm1(self.err) * (1 + mpf(2) ** -50)
        return ErrComplex(v, _add_up(_mul_up(_abs_up(v), grow), _ulp(v, self.prec, 4)), self.prec)

    def log_abs(self) -> ErrReal:
        return self.abs().log()


def refine(compute: Callable[[int], T], tol, start_bits: int = 128,
           max_bits: int = 4096, radius: Callable[[T], object] | None = None) -> T:
    """Run ``compute(bits)`` with doubling precision until its radius <= tol."""
    radius = radius or (lambda r: r.err)
    tol = mpf(tol)
    bits = start_bits
    last_error: Exception | None = None
    while bits <= max_bits:
        try:
            result = compute(bits)
        except (PrecisionExhausted, IntervalContainsZero) as exc:
            last_error = exc
        else:
            if radius(result) <= tol:
                return result
            last_error = None
        bits *= 2
    raise PrecisionExhausted(
        f"tolerance {mpmath.nstr(tol, 3)} not reached within {max_bits} bits"
        + (f" ({last_error})" if last_error else ""))


def bits_for_tol(tol, minimum: int = 128) -> int:
    """Starting precision that comfortably resolves ``tol``."""
    tol = float(tol)
    need = int(-math.log2(tol)) + 64 if tol > 0 else minimum
    return max(minimum, 1 << (need - 1).bit_length())

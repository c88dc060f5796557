"""Weierstrass curves over Q: invariants, minimal models, reduction types.

Everything here is exact rational arithmetic. The only floating-point step
is the final logarithm evaluation in :func:`conductor_norms`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import arith
from .errors import NotPrime, SingularCurve

Rational = Fraction | int


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational a-invariants."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction
    b2: Fraction = field(init=False, repr=False)
    b4: Fraction = field(init=False, repr=False)
    b6: Fraction = field(init=False, repr=False)
    b8: Fraction = field(init=False, repr=False)
    c4: Fraction = field(init=False, repr=False)
    c6: Fraction = field(init=False, repr=False)
    disc: Fraction = field(init=False, repr=False)

    def __post_init__(self):
        a1, a2, a3, a4, a6 = (as_fraction(a) for a in
                              (self.a1, self.a2, self.a3, self.a4, self.a6))
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if disc == 0:
            raise SingularCurve(f"singular curve {[a1, a2, a3, a4, a6]}")
        values = dict(a1=a1, a2=a2, a3=a3, a4=a4, a6=a6, b2=b2, b4=b4,
                      b6=b6, b8=b8, c4=c4, c6=c6, disc=disc)
        for name, value in values.items():
            object.__setattr__(self, name, value)

    @property
    def ainvs(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def j_invariant(self) -> Fraction:
        return self.c4 ** 3 / self.disc

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def contains(self, x: Fraction, y: Fraction) -> bool:
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y == x ** 3 + a2 * x * x + a4 * x + a6

    def __str__(self):
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"


def invariants(a1, a2, a3, a4, a6) -> WeierstrassCurve:
    """Build a curve from raw a-invariants (ints, Fractions or 'p/q' strings)."""
    return WeierstrassCurve(*(as_fraction(a) for a in (a1, a2, a3, a4, a6)))


@dataclass(frozen=True)
class Transform:
    """Change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""

    u: Fraction
    r: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    t: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("u", "r", "s", "t"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.u == 0:
            raise ValueError("u must be nonzero")

    @classmethod
    def identity(cls) -> "Transform":
        return cls(Fraction(1))

    def is_identity(self) -> bool:
        return (self.u, self.r, self.s, self.t) == (1, 0, 0, 0)

    def apply(self, E: WeierstrassCurve) -> WeierstrassCurve:
        u, r, s, t = self.u, self.r, self.s, self.t
        a1, a2, a3, a4, a6 = E.ainvs
        return WeierstrassCurve(
            (a1 + 2 * s) / u,
            (a2 - s * a1 + 3 * r - s * s) / u ** 2,
            (a3 + r * a1 + 2 * t) / u ** 3,
            (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u ** 4,
            (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1) / u ** 6,
        )

    def map_xy(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        """Coordinates on the transformed curve of the point (x, y)."""
        u, r, s, t = self.u, self.r, self.s, self.t
        xx = (x - r) / u ** 2
        yy = (y - s * (x - r) - t) / u ** 3
        return xx, yy

    def unmap_xy(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        u, r, s, t = self.u, self.r, self.s, self.t
        return u * u * x + r, u ** 3 * y + s * u * u * x + t

    def compose(self, other: "Transform") -> "Transform":
        """Apply ``self`` first, then ``other``."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return Transform(
            u1 * u2,
            r1 + u1 * u1 * r2,
            s1 + u1 * s2,
            t1 + u1 * u1 * s1 * r2 + u1 ** 3 * t2,
        )


def _kraus_ok(p: int, c4: int, c6: int) -> bool:
    """Local Kraus condition: (c4, c6) come from a model integral at p."""
    if (c4 ** 3 - c6 * c6) % 1728:
        return False
    if p == 3:
        return arith.valuation(3, c6) != 2
    if p == 2:
        return c6 % 4 == 3 or (arith.valuation(2, c4) >= 4 and c6 % 32 in (0, 8))
    return True


def _scaling_exponent(p: int, c4: int, c6: int) -> int:
    """Largest k such that the model may be scaled by p^k and stay integral."""
    bounds = [arith.valuation(p, c) // e for c, e in ((c4, 4), (c6, 6)) if c]
    k = int(min(bounds)) if bounds else 0
    while k > 0 and p in (2, 3) and not _kraus_ok(p, c4 // p ** (4 * k), c6 // p ** (6 * k)):
        k -= 1
    return k


def _model_from_c4c6(c4: int, c6: int) -> WeierstrassCurve:
    # Reduced model: a1, a3 in {0,1}, a2 in {-1,0,1}.
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4, rem4 = divmod(b2 * b2 - c4, 24)
    b6, rem6 = divmod(-b2 ** 3 + 36 * b2 * b4 - c6, 216)
    a1 = b2 % 2
    a3 = b6 % 2
    a2, rem2 = divmod(b2 - a1, 4)
    a4, rem_a4 = divmod(b4 - a1 * a3, 2)
    a6, rem_a6 = divmod(b6 - a3, 4)
    if rem4 or rem6 or rem2 or rem_a4 or rem_a6:
        raise ArithmeticError(f"(c4, c6) = ({c4}, {c6}) has no integral model")
    return invariants(a1, a2, a3, a4, a6)


def _transform_between(E: WeierstrassCurve, F: WeierstrassCurve, u: Fraction) -> Transform:
    """The (u, r, s, t) taking E to the isomorphic curve F, given u."""
    a1, a2, a3 = E.a1, E.a2, E.a3
    s = (u * F.a1 - a1) / 2
    r = (u * u * F.a2 - a2 + s * a1 + s * s) / 3
    t = (u ** 3 * F.a3 - a3 - r * a1) / 2
    T = Transform(u, r, s, t)
    if T.apply(E) != F:
        raise ArithmeticError("curves are not isomorphic via the computed transform")
    return T


def is_minimal_at(E: WeierstrassCurve, p: int) -> bool:
    """Minimality certificate at p for an integral model."""
    if not E.is_integral():
        return False
    vd = arith.valuation(p, E.disc)
    if vd < 12:
        return True
    c4, c6 = int(E.c4), int(E.c6)
    return _scaling_exponent(p, c4, c6) == 0


@dataclass(frozen=True)
class MinimalModelResult:
    curve: WeierstrassCurve
    transform: Transform
    disc_min: int
    source: WeierstrassCurve

    @cached_property
    def disc_factorization(self) -> dict[int, int]:
        return arith.factorize(self.disc_min)

    @property
    def bad_primes(self) -> list[int]:
        return sorted(self.disc_factorization)

    def certificate(self) -> dict[int, bool]:
        return {p: is_minimal_at(self.curve, p) for p in self.bad_primes}

    def to_minimal(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.transform.map_xy(as_fraction(x), as_fraction(y))

    def from_minimal(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.transform.unmap_xy(x, y)


def minimal_model(E: WeierstrassCurve) -> MinimalModelResult:
    """Global minimal model over Q (Laska-Kraus-Connell)."""
    D = math.lcm(*(a.denominator for a in E.ainvs))
    to_integral = Transform(Fraction(1, D))
    Ei = to_integral.apply(E)
    c4, c6 = int(Ei.c4), int(Ei.c6)
    g = math.gcd(c4, c6)
    u = 1
    for p in arith.prime_divisors(g) if g > 1 else []:
        u *= p ** _scaling_exponent(p, c4, c6)
    F = _model_from_c4c6(c4 // u ** 4, c6 // u ** 6)
    T = to_integral.compose(_transform_between(Ei, F, Fraction(u)))
    if T.apply(E) != F:
        raise ArithmeticError("minimal model transform does not compose")
    return MinimalModelResult(curve=F, transform=T, disc_min=int(F.disc), source=E)


class ReductionKind(enum.Enum):
    GOOD = "Good"
    MULTIPLICATIVE = "Multiplicative"
    ADDITIVE = "Additive"


@dataclass(frozen=True)
class ReductionType:
    prime: int
    kind: ReductionKind


def classify_reduction(min_model: MinimalModelResult, p: int) -> ReductionType:
    if not arith.is_probable_prime(p):
        raise NotPrime(p)
    E = min_model.curve
    if min_model.disc_min % p:
        kind = ReductionKind.GOOD
    elif int(E.c4) % p:
        kind = ReductionKind.MULTIPLICATIVE
    else:
        kind = ReductionKind.ADDITIVE
    return ReductionType(p, kind)


@dataclass(frozen=True)
class ConductorNorms:
    log_N0: "ErrReal"
    log_Nst: "ErrReal"
    log_Nuns: "ErrReal"
    factorizations: tuple[tuple[int, ReductionKind], ...]

    @property
    def bad_primes(self) -> list[int]:
        return [p for p, _ in self.factorizations]

    @property
    def N0(self) -> int:
        return math.prod(self.bad_primes)


def conductor_norms(min_model: MinimalModelResult, bits: int = 128,
                    trial_bound: int = arith.DEFAULT_TRIAL_BOUND) -> ConductorNorms:
    """log N0 (all bad primes), split into multiplicative and additive parts."""
    from .errreal import ErrReal

    primes = sorted(arith.factorize(min_model.disc_min, trial_bound=trial_bound))
    kinds = tuple((p, classify_reduction(min_model, p).kind) for p in primes)
    zero = ErrReal.exact(0, bits)

    def total(which):
        s = zero
        for p, kind in kinds:
            if kind in which:
                s = s + ErrReal.log_of(p, bits)
        return s

    return ConductorNorms(
        log_N0=total({ReductionKind.MULTIPLICATIVE, ReductionKind.ADDITIVE}),
        log_Nst=total({ReductionKind.MULTIPLICATIVE}),
        log_Nuns=total({ReductionKind.ADDITIVE}),
        factorizations=kinds,
    )

"""Canonical (Neron-Tate) heights of rational points.

Normalization: hhat(P) = (1/2) lim 4^-n h(x(2^n P)), where h(x) = log max(|num|, |den|).
The doubled convention used by some tables is ``CanonicalHeight.doubled``.

The main algorithm sums local heights on the minimal model: an archimedean
q-series term plus reduction-type corrections at the bad primes. The
doubling limit with an explicit height-difference bound is kept as an
independent oracle.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mp, mpf

from . import arith
from .curve import MinimalModelResult, WeierstrassCurve
from .errors import InfinityPoint
from .errreal import ErrComplex, ErrReal, bits_for_tol, refine
from .modular import reduce_tau
from .periods import elliptic_log, period_lattice_at
from .points import CurvePoint, check_on_curve, point_add, torsion_order

MAX_ORACLE_STEPS = 12

# Constants of the explicit bound
#   -h(j)/8 - mu - 0.973 <= hhat - h(x)/2 <= h(j)/12 + mu + 1.07
# (Silverman, Math. Comp. 55 (1990), Thm 1.1), for an integral model.
_LOWER_CONST = Fraction(973, 1000)
_UPPER_CONST = Fraction(107, 100)


class Normalization(str, enum.Enum):
    HX_HALF = "HxHalf"


@dataclass(frozen=True)
class CanonicalHeight:
    value: ErrReal
    point: CurvePoint
    normalization: Normalization = Normalization.HX_HALF

    @property
    def doubled(self) -> ErrReal:
        return self.value * 2


@dataclass(frozen=True)
class PairingValue:
    value: ErrReal


def naive_height(P: CurvePoint, prec: int = 128) -> ErrReal:
    """log max(|p|, |q|) for x(P) = p/q in lowest terms."""
    if P.is_infinity:
        raise InfinityPoint("naive height of the point at infinity")
    x = Fraction(P.x)
    return ErrReal.log_of(max(abs(x.numerator), x.denominator), prec)


@functools.lru_cache(maxsize=256)
def _reduced_lattice(E: WeierstrassCurve, bits: int):
    lattice = period_lattice_at(E, bits)
    tau = reduce_tau(lattice.tau)
    w1, _ = lattice.reduced_basis(tau.unimodular)
    return lattice, tau, w1


def archimedean_local_height(E: WeierstrassCurve, P: CurvePoint, bits: int) -> ErrReal:
    """lambda_inf(P) = -B2(beta)/2 log|q| - log|1 - u| - sum log|(1 - q^n u)(1 - q^n/u)|.

    zeta = z/w1 = alpha + beta tau with the reduced period basis, u = exp(2 pi i zeta).
    """
    lattice, tau, w1 = _reduced_lattice(E, bits)
    z = elliptic_log(lattice, P.x, P.y)
    zeta = z / w1
    pi = ErrReal.pi(bits)
    beta = zeta.imag / tau.im
    # shift so that |beta| <= 1/2; the expression below is analytic in zeta
    # for |beta| < 1, so the representative does not matter
    k = int(mpmath.nint(beta.value))
    if k:
        zeta = zeta - tau.tau * k
        beta = beta - k
    two_pi_i = ErrComplex.from_parts(ErrReal.exact(0, bits), pi * 2)
    q = (two_pi_i * tau.tau).exp()
    u = (two_pi_i * zeta).exp()
    log_q = -(pi * 2) * tau.im
    B2 = beta * beta - beta + Fraction(1, 6)
    total = -(B2 * log_q) / 2 - (1 - u).log_abs()
    q_abs = q.abs().upper
    r = abs(beta).upper
    with mp.workprec(64):
        if r >= 1 or q_abs >= 1:
            raise InfinityPoint("point too close to the origin for the q-series")
        target = mpf(2) ** (-bits + 8)
        N = 1
        while 2 * q_abs ** (N + 1 - r) / ((1 - q_abs) * (1 - q_abs ** (N + 1 - r))) >= target:
            N += 1
        tail = 2 * q_abs ** (N + 1 - r) / ((1 - q_abs) * (1 - q_abs ** (N + 1 - r))) * (1 + mpf(2) ** -40)
    inv_u = u.reciprocal()
    qn = q
    acc = ErrReal.exact(0, bits)
    for _ in range(N):
        acc = acc + (1 - qn * u).log_abs() + (1 - qn * inv_u).log_abs()
        qn = qn * q
    total = total - acc
    return ErrReal(total.value, total.err + tail, bits)


def nonarchimedean_local_height(mm: MinimalModelResult, P: CurvePoint, p: int) -> Fraction:
    """lambda_p(P) / log p on the minimal model."""
    E = mm.curve
    x, y = Fraction(P.x), Fraction(P.y)
    v = arith.valuation
    N = v(p, mm.disc_min)
    psi2 = 2 * y + E.a1 * x + E.a3
    psi3 = 3 * x ** 4 + E.b2 * x ** 3 + 3 * E.b4 * x ** 2 + 3 * E.b6 * x + E.b8
    if v(p, 3 * x * x + 2 * E.a2 * x + E.a4 - E.a1 * y) <= 0 or v(p, psi2) <= 0:
        return Fraction(max(0, -v(p, x)), 2) + Fraction(N, 12)
    if v(p, E.c4) == 0:
        # multiplicative reduction, point on a non-identity component
        M = min(Fraction(v(p, psi2)), Fraction(N, 2))
        return M * (M - N) / (2 * N) + Fraction(N, 12)
    if v(p, psi3) >= 3 * v(p, psi2):
        return -Fraction(v(p, psi2), 3) + Fraction(N, 12)
    return -Fraction(v(p, psi3), 8) + Fraction(N, 12)


def finite_local_heights(mm: MinimalModelResult, P: CurvePoint, bits: int) -> ErrReal:
    """Sum of lambda_p over all primes."""
    den = Fraction(P.x).denominator
    total = ErrReal.exact(0, bits)
    for p in mm.bad_primes:
        e = arith.valuation(p, den)
        den //= p ** e
        total = total + ErrReal.log_of(p, bits) * nonarchimedean_local_height(mm, P, p)
    # good primes: lambda_p = (1/2) v_p(den x) log p
    return total + ErrReal.log_of(den, bits) / 2


def _canonical_height_at(mm: MinimalModelResult, P: CurvePoint, bits: int) -> ErrReal:
    return archimedean_local_height(mm.curve, P, bits) + finite_local_heights(mm, P, bits)


def canonical_height(mm: MinimalModelResult, P: CurvePoint, tol=mpf(10) ** -20,
                     max_bits: int = 4096) -> CanonicalHeight:
    E = mm.curve
    check_on_curve(E, P)
    if torsion_order(E, P) is not None:
        return CanonicalHeight(ErrReal.exact(0, bits_for_tol(tol)), P)
    value = refine(lambda bits: _canonical_height_at(mm, P, bits), tol,
                   start_bits=bits_for_tol(tol), max_bits=max_bits)
    return CanonicalHeight(value, P)


def _log_plus(t: Fraction, bits: int) -> ErrReal:
    t = abs(Fraction(t))
    return ErrReal.log_of(t, bits) if t > 1 else ErrReal.exact(0, bits)


def height_difference_bound(E: WeierstrassCurve, bits: int = 128) -> ErrReal:
    """B with |hhat(P) - h(x(P))/2| <= B on an integral model."""
    j = E.j_invariant
    h_j = ErrReal.log_of(max(abs(j.numerator), j.denominator), bits)
    two_star = 2 if E.b2 != 0 else 1
    mu = (ErrReal.log_of(abs(E.disc), bits) / 12 + _log_plus(j, bits) / 12
          + _log_plus(E.b2 / 12, bits) / 2 + ErrReal.log_of(two_star, bits) / 2)
    lower = h_j / 8 + mu + _LOWER_CONST
    upper = h_j / 12 + mu + _UPPER_CONST
    return lower if lower.value >= upper.value else upper


def _double_x(b, res, X, Z):
    """x(2P) = (x^4 - b4 x^2 - 2 b6 x - b8) / (4 x^3 + b2 x^2 + 2 b4 x + b6) with x = X/Z.

    For coprime X, Z the common factor of numerator and denominator divides the
    resultant of the two quartic/cubic forms, which is disc^2; reducing modulo
    ``res`` avoids a full gcd of the (quickly huge) integers.
    """
    b2, b4, b6, b8 = b
    X2, Z2 = X * X, Z * Z
    XZ = X * Z
    num = X2 * X2 - b4 * X2 * Z2 - 2 * b6 * XZ * Z2 - b8 * Z2 * Z2
    den = Z * (4 * X2 * X + b2 * X2 * Z + 2 * b4 * XZ * Z + b6 * Z2 * Z)
    g = gmpy2.gcd(num % res, res)
    if g > 1:
        g = gmpy2.gcd(den % g, g)
    return (num // g, den // g) if g > 1 else (num, den)


def canonical_height_doubling_oracle(mm: MinimalModelResult, P: CurvePoint,
                                     n_steps: int, bits: int = 128) -> ErrReal:
    """(1/2) 4^-n h(x(2^n P)) with radius 4^-n * B (B from the explicit bound)."""
    if not 0 <= n_steps <= MAX_ORACLE_STEPS:
        raise ValueError(f"n_steps must lie in [0, {MAX_ORACLE_STEPS}]")
    E = mm.curve
    check_on_curve(E, P)
    bound = height_difference_bound(E, bits)
    scale = Fraction(1, 4 ** n_steps)
    if P.is_infinity or torsion_order(E, P) is not None:
        # torsion: the limit is exactly 0
        return ErrReal(0, 0, bits)
    b = tuple(gmpy2.mpz(int(c)) for c in (E.b2, E.b4, E.b6, E.b8))
    res = gmpy2.mpz(int(E.disc)) ** 2
    X, Z = gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator)
    for _ in range(n_steps):
        X, Z = _double_x(b, res, X, Z)
        if Z == 0:
            # 2^k P = O: torsion, the limit is exactly 0
            return ErrReal(0, 0, bits)
    h = ErrReal.log_of(max(abs(int(X)), int(Z)), bits)
    value = h * scale / 2
    return ErrReal(value.value, value.err + (bound * scale).upper, bits)


def height_pairing(mm: MinimalModelResult, P: CurvePoint, Q: CurvePoint,
                   tol=mpf(10) ** -20, max_bits: int = 4096) -> PairingValue:
    """<P, Q> = (hhat(P + Q) - hhat(P) - hhat(Q)) / 2."""
    E = mm.curve
    part_tol = mpf(tol) * 2 / 3
    hs = [canonical_height(mm, R, part_tol, max_bits).value
          for R in (point_add(E, P, Q), P, Q)]
    return PairingValue((hs[0] - hs[1] - hs[2]) / 2)


"""Period lattices and elliptic logarithms of real elliptic curves via the AGM.

The lattice is that of the invariant differential dx/(2y + a1 x + a3), i.e.
of Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 with Y = 2y + a1 x + a3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .curve import MinimalModelResult, WeierstrassCurve
from .errors import PrecisionExhausted
from .errreal import ErrComplex, ErrReal, bits_for_tol, refine


@dataclass(frozen=True)
class CubicRoots:
    """Roots of 4x^3 + b2 x^2 + 2 b4 x + b6.

    Positive discriminant: three real roots e1 > e2 > e3.
    Negative discriminant: real e1 and a conjugate pair (e2 has Im > 0).
    """

    positive_disc: bool
    e1: ErrReal
    e2: ErrReal | ErrComplex
    e3: ErrReal | ErrComplex


def _poly(E: WeierstrassCurve):
    return [Fraction(4), E.b2, 2 * E.b4, E.b6]


def _certify_root(coeffs, x0, prec):
    """Radius of a disc about x0 that contains a root (degree * |f/f'|)."""
    ball = ErrComplex(x0, 0, prec) if isinstance(x0, mpmath.mpc) else ErrReal(x0, 0, prec)
    f = ball * 0
    df = ball * 0
    n = len(coeffs) - 1
    for k, c in enumerate(coeffs):
        f = f * ball + c
        if k < n:
            df = df * ball + c * (n - k)
    with mp.workprec(prec + 8):
        fa, dfa = abs(f.value) + f.err, abs(df.value) - df.err
    if dfa <= 0:
        raise PrecisionExhausted("derivative vanishes near a root")
    with mp.workprec(64):
        return mpf(n) * fa / dfa * (1 + mpf(2) ** -40)


def cubic_roots(E: WeierstrassCurve, prec: int) -> CubicRoots:
    coeffs = _poly(E)
    with mp.workprec(prec + 32):
        approx = mp.polyroots([mpf(c.numerator) / c.denominator for c in coeffs],
                              maxsteps=400, extraprec=2 * prec + 64)
    if E.disc > 0:
        xs = sorted((mpmath.re(r) for r in approx), reverse=True)
        with mp.workprec(prec):
            xs = [+x for x in xs]
        rads = [_certify_root(coeffs, x, prec) for x in xs]
        if not (xs[0] - rads[0] > xs[1] + rads[1] and xs[1] - rads[1] > xs[2] + rads[2]):
            raise PrecisionExhausted("real roots not separated")
        return CubicRoots(True, *(ErrReal(x, r, prec) for x, r in zip(xs, rads)))
    real = min(approx, key=lambda r: abs(mpmath.im(r)))
    cplx = max(approx, key=lambda r: mpmath.im(r))
    with mp.workprec(prec):
        x1 = +mpmath.re(real)
        x2 = mpmath.mpc(+cplx.real, +cplx.imag)
    r1 = _certify_root(coeffs, x1, prec)
    r2 = _certify_root(coeffs, x2, prec)
    with mp.workprec(prec):
        separated = x2.imag > r2 and abs(x2 - x1) > r1 + r2
    if not separated:
        raise PrecisionExhausted("complex roots not separated from the real axis")
    e2 = ErrComplex(x2, r2, prec)
    return CubicRoots(False, ErrReal(x1, r1, prec), e2, e2.conj())


def agm(a: ErrReal, b: ErrReal) -> ErrReal:
    """Arithmetic-geometric mean of two positive real balls.

    The limit lies between the two sequences, so the hull of the final pair
    encloses it.
    """
    prec = max(a.prec, b.prec)
    for _ in range(4 * prec.bit_length() + 64):
        gap = abs(a.value - b.value)
        if gap <= abs(a.value) * mpf(2) ** (-prec) or gap <= a.err + b.err:
            break
        a, b = (a + b) / 2, (a * b).sqrt()
    else:
        raise PrecisionExhausted("AGM did not converge")
    lo = min(a.lower, b.lower)
    hi = max(a.upper, b.upper)
    with mp.workprec(prec + 8):
        mid = (lo + hi) / 2
        rad = (hi - lo) / 2
    return ErrReal(mid, rad * (1 + mpf(2) ** -50), prec)


@dataclass(frozen=True)
class PeriodLattice:
    """Lattice Z*w1 + Z*w2 with Im(w2/w1) > 0; w1 is the real period."""

    curve: WeierstrassCurve
    roots: CubicRoots
    w1: ErrComplex
    w2: ErrComplex
    agm_main: ErrReal
    prec: int

    @property
    def tau(self) -> ErrComplex:
        return self.w2 / self.w1

    @property
    def err(self):
        return max(self.w1.err, self.w2.err)

    def reduced_basis(self, matrix) -> tuple[ErrComplex, ErrComplex]:
        """(w1', w2') for tau' = (a tau + b)/(c tau + d)."""
        (a, b), (c, d) = matrix
        w2n = self.w2 * a + self.w1 * b
        w1n = self.w2 * c + self.w1 * d
        return w1n, w2n


def _curve_of(obj) -> WeierstrassCurve:
    return obj.curve if isinstance(obj, MinimalModelResult) else obj


def period_lattice_at(obj, prec: int) -> PeriodLattice:
    E = _curve_of(obj)
    roots = cubic_roots(E, prec)
    pi = ErrReal.pi(prec)
    I = mpmath.mpc(0, 1)
    if roots.positive_disc:
        e1, e2, e3 = roots.e1, roots.e2, roots.e3
        a = (e1 - e3).sqrt()
        M1 = agm(a, (e1 - e2).sqrt())
        M2 = agm(a, (e2 - e3).sqrt())
        w1 = ErrComplex.from_parts(pi / M1)
        w2 = ErrComplex.from_parts(pi / M2) * ErrComplex(I, 0, prec)
    else:
        e1 = roots.e1
        alpha = (e1 * e1 * 3 + e1 * (E.b2 / 2) + E.b4 / 2).sqrt()
        beta = e1 * 3 + E.b2 / 4
        p = alpha.sqrt() * 2
        M1 = agm(p, (alpha * 2 + beta).sqrt())
        M2 = agm(p, (alpha * 2 - beta).sqrt())
        w1r = pi * 2 / M1
        w1 = ErrComplex.from_parts(w1r)
        w2 = ErrComplex.from_parts(-w1r / 2, pi / M2)
    return PeriodLattice(E, roots, w1, w2, M1, prec)


def period_lattice(obj, tol=mpf(10) ** -30, max_bits: int = 4096) -> PeriodLattice:
    """Certified period lattice with radii <= tol.

    ``obj`` is a WeierstrassCurve or a MinimalModelResult (then the minimal
    model's lattice is returned).
    """
    return refine(lambda bits: period_lattice_at(obj, bits), tol,
                  start_bits=bits_for_tol(tol), max_bits=max_bits,
                  radius=lambda L: L.err)


def _hull(lo_ball: ErrReal, hi_ball: ErrReal) -> ErrReal:
    lo, hi = lo_ball.lower, hi_ball.upper
    if lo > hi:
        lo, hi = hi_ball.lower, lo_ball.upper
    prec = max(lo_ball.prec, hi_ball.prec)
    with mp.workprec(prec + 8):
        return ErrReal((lo + hi) / 2, (hi - lo) / 2 * (1 + mpf(2) ** -50), prec)


def _log_identity_component(a: ErrReal, b: ErrReal, c: ErrReal) -> ErrReal:
    """Integral from c to infinity of ds / sqrt((s^2 - a^2)(s^2 - a^2 + b^2))."""
    prec = a.prec
    for _ in range(4 * prec.bit_length() + 64):
        if abs(a.value - b.value) <= abs(a.value) * mpf(2) ** (-prec):
            break
        a, b, c = (a + b) / 2, (a * b).sqrt(), (c + (c * c - a * a + b * b).sqrt()) / 2
    else:
        raise PrecisionExhausted("Landen descent did not converge")
    low = (a / c).asin() / a
    gap = a * a - b * b
    if gap.lower < 0:
        gap = ErrReal(0, gap.upper, prec)
    high = low / (1 - gap / (c * c)).sqrt()
    return _hull(low, high)


def _log_one_real_root(p: ErrReal, q: ErrReal, w: ErrReal, M: ErrReal) -> ErrReal:
    """Integral from w to infinity of dt / sqrt((t^2 + p^2)(t^2 + q^2))."""
    prec = p.prec
    pi = ErrReal.pi(prec)
    full = pi / M
    offset = ErrReal.exact(0, prec)
    scale = Fraction(1)
    for _ in range(4 * prec.bit_length() + 64):
        if w.lower <= 0 <= w.upper:
            # J(w) = pi/(2M) - integral over [0, w]; integrand <= 1/(pq)
            slop = abs(w).upper / (p.lower * q.lower)
            mid = offset + (full / 2) * scale
            return ErrReal(mid.value, mid.err + slop * abs(scale.numerator) / mpf(scale.denominator) * (1 + mpf(2) ** -40), prec)
        if w.is_negative():
            offset = offset + full * scale
            scale = -scale
            w = -w
        if abs(p.value - q.value) <= abs(p.value) * mpf(2) ** (-prec):
            break
        scale = scale / 2
        w = (w - p * q / w) / 2
        p, q = (p + q) / 2, (p * q).sqrt()
    else:
        raise PrecisionExhausted("Gauss descent did not converge")
    big, small = (p, q) if p.value >= q.value else (q, p)
    j_lo = big.atan2(w) / big
    j_hi = small.atan2(w) / small
    return offset + _hull(j_lo, j_hi) * scale


def elliptic_log(lattice: PeriodLattice, x, y) -> ErrComplex:
    """z in C with (x, y) = (wp(z) - b2/12, ...), defined modulo the lattice.

    The sign of z (i.e. z versus -z) is not normalised; callers that need it
    must use an even function of z.
    """
    E = lattice.curve
    prec = lattice.prec
    roots = lattice.roots
    xr = ErrReal.exact(Fraction(x), prec)
    if roots.positive_disc:
        e1, e2, e3 = roots.e1, roots.e2, roots.e3
        on_egg = False
        if xr.lower > e1.upper:
            pass
        elif xr.upper < e1.lower:
            on_egg = True
            xr = e3 + (e3 - e1) * (e3 - e2) / (xr - e3)
        else:
            raise PrecisionExhausted("cannot place the point on a real component")
        a = (e1 - e3).sqrt()
        b = (e1 - e2).sqrt()
        c = (xr - e3).sqrt()
        z = ErrComplex.from_parts(_log_identity_component(a, b, c))
        if on_egg:
            z = z + lattice.w2 / 2
        return z
    e1 = roots.e1
    alpha = (e1 * e1 * 3 + e1 * (E.b2 / 2) + E.b4 / 2).sqrt()
    beta = e1 * 3 + E.b2 / 4
    s = xr - e1
    if not s.is_positive():
        raise PrecisionExhausted("point too close to the real 2-torsion point")
    rs = s.sqrt()
    w = rs - alpha / rs
    p = alpha.sqrt() * 2
    q = (alpha * 2 + beta).sqrt()
    return ErrComplex.from_parts(_log_one_real_root(p, q, w, lattice.agm_main))

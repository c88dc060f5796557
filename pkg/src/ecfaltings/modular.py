"""SL2(Z) reduction of tau and the modular discriminant q-series."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import BoundaryAmbiguity, PrecisionExhausted
from .errreal import ErrComplex, ErrReal

Matrix = tuple[tuple[int, int], tuple[int, int]]
IDENTITY: Matrix = ((1, 0), (0, 1))


def matmul(m: Matrix, n: Matrix) -> Matrix:
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def matinv(m: Matrix) -> Matrix:
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def act(m: Matrix, tau: ErrComplex) -> ErrComplex:
    """Moebius action (a tau + b) / (c tau + d)."""
    (a, b), (c, d) = m
    return (tau * a + b) / (tau * c + d)


@dataclass(frozen=True)
class TauPoint:
    re: ErrReal
    im: ErrReal
    reduced: bool
    unimodular: Matrix

    @property
    def tau(self) -> ErrComplex:
        return ErrComplex.from_parts(self.re, self.im)

    @property
    def prec(self) -> int:
        return self.re.prec

    def recover_input(self) -> ErrComplex:
        return act(matinv(self.unimodular), self.tau)


def reduce_tau(tau: ErrComplex, max_steps: int = 10_000) -> TauPoint:
    """Move tau into the standard fundamental domain, recording the matrix."""
    if not tau.imag.is_positive():
        raise BoundaryAmbiguity("Im tau is not certified positive")
    m = IDENTITY
    t = tau
    for _ in range(max_steps):
        if t.err > mpf(1) / 16:
            raise BoundaryAmbiguity("radius too large to certify the reduction")
        n = int(mpmath.nint(t.value.real))
        if n:
            t = t - n
            m = matmul(((1, -n), (0, 1)), m)
        if abs(t.value) < 1:
            t = -t.reciprocal()
            m = matmul(((0, -1), (1, 0)), m)
            continue
        break
    else:
        raise BoundaryAmbiguity("reduction did not terminate")
    re, im = t.real, t.imag
    with mp.workprec(t.prec + 16):
        certified = (abs(re.value) <= mpf(1) / 2 + re.err
                     and re.value ** 2 + im.value ** 2 >= 1 - 4 * t.err)
    if not certified or not im.is_positive():
        raise BoundaryAmbiguity("reduced tau could not be certified")
    return TauPoint(re, im, True, m)


def _qseries_terms(q_abs_upper: mpf, tol: mpf) -> int:
    # smallest N with 24 |q|^(N+1) / (1 - |q|) < tol / 2
    with mp.workprec(64):
        if q_abs_upper >= 1:
            raise PrecisionExhausted("|q| >= 1")
        N = 1
        while 24 * q_abs_upper ** (N + 1) / (1 - q_abs_upper) >= tol / 2:
            N += 1
            if N > 100_000:
                raise PrecisionExhausted("q-series too slow")
    return N


def log_modular_discriminant(tau, tol=None) -> ErrReal:
    """log |Delta(tau)| = -2 pi Im tau + 24 sum log|1 - q^n|, q = exp(2 pi i tau).

    ``tau`` is a TauPoint or an ErrComplex. The truncated tail is bounded
    by 24 |q|^(N+1) / ((1 - |q|)(1 - |q|^(N+1))) and folded into the radius.
    """
    if isinstance(tau, TauPoint):
        tau = tau.tau
    prec = tau.prec
    if tol is None:
        tol = mpf(2) ** (-prec + 8)
    pi = ErrReal.pi(prec)
    two_pi_i = ErrComplex.from_parts(ErrReal.exact(0, prec), pi * 2)
    q = (two_pi_i * tau).exp()
    q_abs = q.abs()
    N = _qseries_terms(q_abs.upper, mpf(tol))
    total = -(pi * 2) * tau.imag
    acc = ErrReal.exact(0, prec)
    qn = q
    for _ in range(N):
        acc = acc + (1 - qn).log_abs()
        qn = qn * q
    with mp.workprec(64):
        qa = q_abs.upper
        tail = 24 * qa ** (N + 1) / ((1 - qa) * (1 - qa ** (N + 1))) * (1 + mpf(2) ** -40)
    total = total + acc * 24
    return ErrReal(total.value, total.err + tail, prec)

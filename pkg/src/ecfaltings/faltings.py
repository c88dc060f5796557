"""Faltings height of an elliptic curve over Q and the archimedean quantities
that come with it: reduced tau, injectivity diameter, Matrix Lemma slack.

Over Q there is a single archimedean place, so

    hF+ = (1/12) * (log|disc_min| - log|Delta(tau)| - 6 log(2 Im tau))

with tau reduced. The classical height differs by (1/2) log(2 pi^2).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf

from .curve import MinimalModelResult, WeierstrassCurve, minimal_model
from .errreal import ErrReal, bits_for_tol, refine
from .modular import TauPoint, log_modular_discriminant, reduce_tau
from .periods import PeriodLattice, period_lattice_at
from .verdict import Verdict

MATRIX_LEMMA_SLOPE = 16
MATRIX_LEMMA_OFFSET = 39  # per unit of dimension


@dataclass(frozen=True)
class FaltingsReport:
    tau: TauPoint
    log_mod_disc: ErrReal
    hF_plus: ErrReal
    rho_sq_inv: ErrReal
    curve_label: str
    lattice: PeriodLattice

    @property
    def hF_classical(self) -> ErrReal:
        return self.hF_plus - classical_shift(self.hF_plus.prec)

    @property
    def rho(self) -> ErrReal:
        return (1 / self.rho_sq_inv).sqrt()

    @property
    def prec(self) -> int:
        return self.hF_plus.prec


def classical_shift(prec: int, g: int = 1) -> ErrReal:
    """(g/2) log(2 pi^2), the gap between hF+ and the classical Faltings height."""
    pi = ErrReal.pi(prec)
    return (pi * pi * 2).log() * g / 2


def _as_minimal(obj) -> MinimalModelResult:
    if isinstance(obj, MinimalModelResult):
        return obj
    if isinstance(obj, WeierstrassCurve):
        return minimal_model(obj)
    raise TypeError(f"expected a curve or minimal model, got {type(obj).__name__}")


def injectivity_diameter_sq(tau: TauPoint) -> ErrReal:
    """rho^2 = min(1, |tau|^2) / Im tau for the lattice Z + tau Z.

    The Riemann form of the principal polarization is H(z, w) = z conj(w) / Im tau.
    """
    im = tau.im
    mod_sq = tau.re * tau.re + im * im
    shortest = mod_sq if mod_sq.upper < 1 else ErrReal.exact(1, tau.prec)
    return shortest / im


def injectivity_diameter(tau: TauPoint) -> ErrReal:
    return injectivity_diameter_sq(tau).sqrt()


def faltings_height_at(obj, bits: int, label: str = "") -> FaltingsReport:
    mm = _as_minimal(obj)
    lattice = period_lattice_at(mm, bits)
    tau = reduce_tau(lattice.tau)
    log_delta = log_modular_discriminant(tau)
    log_disc = ErrReal.log_of(abs(mm.disc_min), bits)
    two_im = tau.im * 2
    hF = (log_disc - log_delta - two_im.log() * 6) / 12
    rho_sq_inv = 1 / injectivity_diameter_sq(tau)
    return FaltingsReport(tau, log_delta, hF, rho_sq_inv, label or str(mm.curve), lattice)


def faltings_height(obj, tol=mpf(10) ** -20, label: str = "",
                    max_bits: int = 4096) -> FaltingsReport:
    """hF+ of the curve with radius <= tol (minimalizes non-minimal input)."""
    mm = _as_minimal(obj)
    return refine(lambda bits: faltings_height_at(mm, bits, label), tol,
                  start_bits=bits_for_tol(tol), max_bits=max_bits,
                  radius=lambda r: r.hF_plus.err)


def discriminant_identity_residual(obj, bits: int = 256) -> ErrReal:
    """log|disc_min| + 12 log|w1| - 12 log(2 pi) - log|Delta(tau)|.

    w1 is the first vector of the reduced period basis. The residual is zero
    exactly; the returned ball measures how well the period and q-series
    computations agree.
    """
    mm = _as_minimal(obj)
    lattice = period_lattice_at(mm, bits)
    tau = reduce_tau(lattice.tau)
    w1, _ = lattice.reduced_basis(tau.unimodular)
    log_delta = log_modular_discriminant(tau)
    pi = ErrReal.pi(bits)
    return (ErrReal.log_of(abs(mm.disc_min), bits) + w1.abs().log() * 12
            - (pi * 2).log() * 12 - log_delta)


def height_conductor_check(report: FaltingsReport, log_N0: ErrReal, d: int = 1) -> Verdict:
    """hF+ >= (1/(12 d)) log N0."""
    return Verdict.from_slack(report.hF_plus - log_N0 / (12 * d), "hF+ - log(N0)/12d")


def matrix_lemma_check(report: FaltingsReport, g: int = 1) -> Verdict:
    """rho^-2 <= 16 hF+ + 39 g at the single real place."""
    slack = report.hF_plus * MATRIX_LEMMA_SLOPE + MATRIX_LEMMA_OFFSET * g - report.rho_sq_inv
    return Verdict.from_slack(slack, "16 hF+ + 39 - rho^-2")

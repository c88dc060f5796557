"""Mordell-Weil lattices: Gram matrices of the height pairing, regulators,
successive minima and the Minkowski and Hadamard inequalities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpf

from .curve import MinimalModelResult
from .errors import BoundTooSmall, DegenerateLattice, TorsionGenerator
from .errreal import ErrReal, to_fraction
from .heights import canonical_height, height_pairing
from .points import CurvePoint, is_torsion, linear_combination
from .verdict import Status, Verdict

DEFAULT_SEARCH_BOUND = 25
MAX_ENUMERATION_RANK = 8

Gram = tuple[tuple[ErrReal, ...], ...]


@dataclass(frozen=True)
class HeightLattice:
    gram: Gram
    generators: tuple[CurvePoint, ...] = ()
    curve: MinimalModelResult | None = field(default=None, compare=False)

    @property
    def m(self) -> int:
        return len(self.gram)

    @classmethod
    def from_gram(cls, rows, prec: int = 128) -> "HeightLattice":
        """Lattice from a synthetic Gram matrix of numbers or ErrReals."""
        gram = tuple(tuple(v if isinstance(v, ErrReal) else ErrReal.exact(Fraction(v), prec)
                           for v in row) for row in rows)
        if any(len(row) != len(gram) for row in gram):
            raise ValueError("Gram matrix must be square")
        return cls(gram)

    def transform(self, U) -> "HeightLattice":
        """The lattice in the basis b_i = sum_j U[i][j] e_j (gram -> U G U^T)."""
        m = self.m
        gram = tuple(
            tuple(_dot([U[i][k] * U[j][l] for k in range(m) for l in range(m)],
                       [self.gram[k][l] for k in range(m) for l in range(m)], self._prec)
                  for j in range(m))
            for i in range(m))
        gens = self.generators
        if gens and self.curve is not None:
            gens = tuple(linear_combination(self.curve.curve, row, gens) for row in U)
        return HeightLattice(gram, gens, self.curve)

    @property
    def _prec(self) -> int:
        return max((v.prec for row in self.gram for v in row), default=128)

    def norm(self, coeffs) -> ErrReal:
        """Quadratic form value n^T G n."""
        m = self.m
        return _dot([coeffs[i] * coeffs[j] for i in range(m) for j in range(m)],
                    [self.gram[i][j] for i in range(m) for j in range(m)], self._prec)


def _dot(ints, balls, prec) -> ErrReal:
    total = ErrReal.exact(0, prec)
    for n, b in zip(ints, balls):
        if n:
            total = total + b * n
    return total


@dataclass(frozen=True)
class RegulatorReport:
    reg_L: ErrReal
    reg_poincare: ErrReal
    minima_sq: tuple[ErrReal, ...] = ()
    m0: int = 0
    m: int = 0

    @property
    def zariski_rank(self) -> int:
        return self.m - self.m0


def build_lattice(mm: MinimalModelResult, points, tol=mpf(10) ** -20,
                  max_bits: int = 4096) -> HeightLattice:
    E = mm.curve
    points = tuple(points)
    for P in points:
        if is_torsion(E, P):
            raise TorsionGenerator(f"{P} is a torsion point")
    m = len(points)
    heights = [canonical_height(mm, P, tol, max_bits).value for P in points]
    rows = [[None] * m for _ in range(m)]
    for i in range(m):
        rows[i][i] = heights[i]
        for j in range(i + 1, m):
            rows[i][j] = rows[j][i] = height_pairing(mm, points[i], points[j], tol, max_bits).value
    lat = HeightLattice(tuple(tuple(r) for r in rows), points, mm)
    determinant(lat)  # independence certificate
    return lat


def determinant(lat: HeightLattice) -> ErrReal:
    """det of the Gram ball matrix, certified; DegenerateLattice if it may vanish.

    The determinant of the midpoint matrix is computed exactly (fraction-free
    elimination); the radius comes from Hadamard's inequality:
    |det(A + D) - det A| <= prod(|a_i| + |d_i|) - prod |a_i| over rows.
    """
    m = lat.m
    prec = lat._prec
    if m == 0:
        return ErrReal.exact(1, prec)
    mids = [[to_fraction(v.value) for v in row] for row in lat.gram]
    det = _bareiss_det(mids)
    # prod(a_i + e_i) - prod(a_i) <= sum_i e_i prod_{j != i} (a_j + e_j)
    with mp.workprec(64):
        norms = []
        for row in mids:
            sq = sum(x * x for x in row)
            norms.append(mp.sqrt(mp.fdiv(sq.numerator, sq.denominator, rounding="u")) * (1 + mpf(2) ** -60))
        errs = [sum(v.err for v in row) * (1 + mpf(2) ** -60) for row in lat.gram]
        radius = mpf(0)
        for i in range(m):
            term = errs[i]
            for j in range(m):
                if j != i:
                    term *= (norms[j] + errs[j]) * (1 + mpf(2) ** -60)
            radius += term
        radius *= 1 + mpf(2) ** -50
    with mp.workprec(prec):
        value = mpf(det.numerator) / det.denominator
    if to_fraction(value) != det:
        with mp.workprec(64):
            radius = radius + abs(value) * mpf(2) ** (1 - prec)
    ball = ErrReal(value, radius, prec)
    if not ball.excludes_zero():
        raise DegenerateLattice("Gram determinant is zero within its radius")
    return ball


def _bareiss_det(rows: list[list[Fraction]]) -> Fraction:
    # clear denominators, then fraction-free elimination over Z
    m = len(rows)
    den = math.lcm(*(x.denominator for row in rows for x in row))
    A = [[int(x * den) for x in row] for row in rows]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, m) if A[i][k]), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return Fraction(sign * A[m - 1][m - 1], den ** m)


def regulator(lat: HeightLattice, search_bound: int | None = DEFAULT_SEARCH_BOUND) -> RegulatorReport:
    """Reg_L = |det gram| and the Poincare-pairing regulator 2^m Reg_L.

    Successive minima are included when ``search_bound`` is not None.
    """
    det = determinant(lat)
    reg = abs(det)
    minima = tuple(successive_minima(lat, search_bound)) if search_bound is not None else ()
    return RegulatorReport(reg, reg.ldexp(lat.m), minima, 0, lat.m)


def _inverse_diagonal(rows: list[list[Fraction]]) -> list[Fraction]:
    """Diagonal of the inverse of a positive definite rational matrix."""
    m = len(rows)
    A = [list(row) + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(rows)]
    for k in range(m):
        piv = next(i for i in range(k, m) if A[i][k] != 0)
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for i in range(m):
            if i != k and A[i][k]:
                f = A[i][k]
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return [A[i][m + i] for i in range(m)]


def _gso(G: list[list[Fraction]]):
    """Gram-Schmidt data (d_i = |b_i*|^2, mu_ij for j < i) from a Gram matrix."""
    m = len(G)
    d = [Fraction(0)] * m
    mu = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i):
            mu[i][j] = (G[i][j] - sum(mu[j][k] * mu[i][k] * d[k] for k in range(j))) / d[j]
        d[i] = G[i][i] - sum(mu[i][k] ** 2 * d[k] for k in range(i))
        if d[i] <= 0:
            raise DegenerateLattice("Gram matrix is not positive definite")
    return d, mu


def _lll_gram(G: list[list[Fraction]], delta=Fraction(3, 4)) -> list[list[int]]:
    """Unimodular U with U G U^T LLL-reduced (exact rational arithmetic)."""
    m = len(G)
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def gram():
        return [[sum(U[i][a] * G[a][b] * U[j][b] for a in range(m) for b in range(m))
                 for j in range(m)] for i in range(m)]

    k = 1
    while k < m:
        for j in range(k - 1, -1, -1):
            _, mu = _gso(gram())
            q = round(mu[k][j])
            if q:
                U[k] = [a - q * b for a, b in zip(U[k], U[j])]
        d, mu = _gso(gram())
        if d[k] >= (delta - mu[k][k - 1] ** 2) * d[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            k = max(k - 1, 1)
    return U


def _row_times(v, U) -> tuple[int, ...]:
    m = len(U)
    return tuple(sum(v[i] * U[i][j] for i in range(m)) for j in range(m))


def _sign_normalized(v) -> tuple[int, ...]:
    return v if next(x for x in v if x) > 0 else tuple(-x for x in v)


def _rank(vectors: list[tuple[int, ...]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def short_vectors(lat: HeightLattice, bound: Fraction, search_bound: int):
    """All nonzero n (up to sign) with |n_j| <= search_bound and n^T G n <= bound.

    Raises BoundTooSmall when the ellipsoid n^T G n <= bound is not contained
    in the box, using |n_j|^2 <= bound * (G^-1)_jj.
    """
    m = lat.m
    mids = [[to_fraction(v.value) for v in row] for row in lat.gram]
    # entry radii move n^T G n by at most err * (sum |n_j|)^2
    err = max((v.err for row in lat.gram for v in row), default=mpf(0))
    with mp.workprec(64):
        pad = to_fraction(mp.fadd(err, 0, rounding="u")) * (m * search_bound) ** 2
    padded = bound + pad
    limits = [math.isqrt(math.floor(padded * d)) for d in _inverse_diagonal(mids)]
    if any(r > search_bound for r in limits):
        raise BoundTooSmall(f"ellipsoid needs |n_j| <= {max(limits)} > search bound {search_bound}")
    out = []
    _enumerate(_ldl(mids), m, padded, limits, [0] * m, m - 1, Fraction(0), out)
    return out


def _ldl(G: list[list[Fraction]]):
    """Coefficients (d_i, mu_ij) with n^T G n = sum_i d_i (n_i + sum_{j>i} mu_ij n_j)^2."""
    m = len(G)
    A = [row[:] for row in G]
    d = [Fraction(0)] * m
    mu = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise DegenerateLattice("Gram matrix is not positive definite")
        for j in range(i + 1, m):
            mu[i][j] = A[i][j] / d[i]
        for j in range(i + 1, m):
            for k in range(i + 1, m):
                A[j][k] -= mu[i][j] * mu[i][k] * d[i]
    return d, mu


def _enumerate(q, m, bound, limits, n, i, used, out):
    d, mu = q
    centre = -sum(mu[i][j] * n[j] for j in range(i + 1, m))
    room = (bound - used) / d[i]
    if room < 0:
        return
    # n_i in [centre - sqrt(room), centre + sqrt(room)]
    s = math.isqrt(math.floor(room)) + 1
    lo = max(-limits[i], math.floor(centre) - s)
    hi = min(limits[i], math.ceil(centre) + s)
    for v in range(lo, hi + 1):
        t = v - centre
        val = used + d[i] * t * t
        if val > bound:
            continue
        n[i] = v
        if i == 0:
            if any(n) and next(x for x in n if x) > 0:
                out.append(tuple(n))
        else:
            _enumerate(q, m, bound, limits, n, i - 1, val, out)
    n[i] = 0


def successive_minima(lat: HeightLattice, search_bound: int = DEFAULT_SEARCH_BOUND,
                      return_vectors: bool = False):
    """lambda_1^2 <= ... <= lambda_m^2 by enumeration.

    The basis vectors show lambda_m^2 <= max G_ii, so every minimizer lies
    in the ellipsoid n^T G n <= max G_ii, which is enumerated completely.
    """
    m = lat.m
    if m == 0:
        return ([], []) if return_vectors else []
    if m > MAX_ENUMERATION_RANK:
        raise BoundTooSmall(f"rank {m} exceeds the enumeration limit {MAX_ENUMERATION_RANK}")
    determinant(lat)
    # enumerate in an LLL-reduced basis b' = U b; the ellipsoid is basis-free,
    # so this only shrinks the box and the bound, never the certified set
    U = _lll_gram([[to_fraction(v.value) for v in row] for row in lat.gram])
    reduced = HeightLattice(lat.gram).transform(U)
    bound = max(to_fraction(reduced.gram[i][i].upper) for i in range(m))
    candidates = [_sign_normalized(_row_times(v, U))
                  for v in short_vectors(reduced, bound, search_bound)]
    scored = sorted(((lat.norm(v), v) for v in candidates), key=lambda t: (t[0].value, t[1]))
    chosen, values = [], []
    for val, v in scored:
        if _rank(chosen + [v]) > len(chosen):
            chosen.append(v)
            values.append(val)
            if len(chosen) == m:
                break
    if len(chosen) < m:
        raise BoundTooSmall("enumeration did not find a full set of independent vectors")
    return (values, chosen) if return_vectors else values


def minkowski_check(report: RegulatorReport) -> Verdict:
    """prod lambda_i^2 <= m^m Reg_L."""
    m = report.m
    if m == 0:
        return Verdict.vacuous("m = 0")
    prod = report.minima_sq[0]
    for v in report.minima_sq[1:]:
        prod = prod * v
    slack = report.reg_L * (m ** m) - prod
    if m == 1:
        # lambda_1^2 = <P, P> = Reg_L for a rank-one lattice
        return Verdict(Status.PASS, slack, "equality: rank one")
    return Verdict.from_slack(slack, "m^m Reg_L - prod lambda_i^2")


def hadamard_check(lat: HeightLattice) -> Verdict:
    """Reg_L <= prod G_ii."""
    if lat.m == 0:
        return Verdict.vacuous("m = 0")
    prod = lat.gram[0][0]
    for i in range(1, lat.m):
        prod = prod * lat.gram[i][i]
    slack = prod - abs(determinant(lat))
    if _is_diagonal(lat):
        return Verdict(Status.PASS, slack, "equality: diagonal Gram matrix")
    return Verdict.from_slack(slack, "prod G_ii - Reg_L")


def _is_diagonal(lat: HeightLattice) -> bool:
    return all(lat.gram[i][j].value == 0 and lat.gram[i][j].err == 0
               for i, j in itertools.product(range(lat.m), repeat=2) if i != j)

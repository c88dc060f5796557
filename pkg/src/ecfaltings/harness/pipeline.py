"""Per-curve verification pipeline and the corpus driver."""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from mpmath import mpf

from ..bounds import RankBoundInputs, max_one, rank_bound
from ..curve import conductor_norms, invariants, minimal_model
from ..errors import EcFaltingsError, NoGenerators
from ..errreal import ErrReal, to_fraction
from ..faltings import (discriminant_identity_residual, faltings_height,
                        height_conductor_check, matrix_lemma_check)
from ..heights import canonical_height
from ..lattice import (DEFAULT_SEARCH_BOUND, HeightLattice, build_lattice, hadamard_check,
                       minkowski_check, regulator)
from ..points import CurvePoint, linear_combination, point_add, torsion_points
from ..verdict import Status, Verdict
from .corpus import CorpusEntry, errreal_to_json, format_rational

VERDICTS = ("height_conductor", "matrix_lemma", "rank_bound", "minkowski", "hadamard")
CHECKS = VERDICTS + ("ls",)
IDENTITY_BITS = 256


@dataclass(frozen=True)
class Config:
    tol: mpf = mpf(10) ** -12
    max_bits: int = 4096
    checks: frozenset = frozenset(CHECKS)
    ls_box: int = 10
    search_bound: int = DEFAULT_SEARCH_BOUND
    jobs: int = 1
    ls_seed: int | None = None

    def __post_init__(self):
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}; choose from {', '.join(CHECKS)}")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


# -- Lang-Silverman scan --------------------------------------------------

@dataclass(frozen=True)
class LsResult:
    min_height: ErrReal
    ratio: ErrReal
    lambda1_ratio: ErrReal | None
    minimizer: tuple[int, ...]
    coset_min: ErrReal | None = None


def _box_vectors(m: int, box: int, seed: int | None):
    vecs = [v for v in itertools.product(range(-box, box + 1), repeat=m)
            if any(v) and next(x for x in v if x) > 0]
    if seed is not None:
        random.Random(seed).shuffle(vecs)
    return vecs


def scan_lattice(lat: HeightLattice, hF_plus: ErrReal, box: int, seed: int | None = None,
                 minima_sq=None, mm=None, torsion=(), tol=mpf(10) ** -12) -> LsResult:
    """min hhat over nonzero sum n_i P_i (+ T), |n_i| <= box, divided by max{1, hF+}.

    Candidates are ranked exactly on the integer-scaled midpoint Gram matrix,
    ties broken by the coefficient vector, so the visiting order is irrelevant.
    With ``mm`` and ``torsion`` the heights of n P + T are recomputed for
    every torsion point T as an independent check of the coset minimum.
    """
    m = lat.m
    if m == 0 or box < 1:
        raise NoGenerators("empty search box" if m else "no generators")
    mids = [[to_fraction(v.value) for v in row] for row in lat.gram]
    den = 1
    for row in mids:
        for x in row:
            den = den * x.denominator // _gcd(den, x.denominator)
    G = [[int(x * den) for x in row] for row in mids]
    best = None
    for v in _box_vectors(m, box, seed):
        q = sum(v[i] * v[j] * G[i][j] for i in range(m) for j in range(m))
        key = (q, v)
        if best is None or key < best:
            best = key
    n = best[1]
    value = lat.norm(n)
    scale = max_one(hF_plus)
    lam = minima_sq[0] / scale if minima_sq else None
    coset = None
    if mm is not None and torsion:
        Q = linear_combination(mm.curve, n, lat.generators)
        hs = [canonical_height(mm, point_add(mm.curve, Q, T), tol).value for T in torsion]
        coset = min(hs, key=lambda h: h.value)
    return LsResult(value, value / scale, lam, n, coset)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def ls_scan(entry: CorpusEntry, box: int, config: Config = Config()) -> LsResult:
    mm = minimal_model(invariants(*entry.ainvs))
    pts = _generators_on_minimal(entry, mm)
    if not pts:
        raise NoGenerators(f"{entry.label} has no generators")
    if box < 1:
        raise NoGenerators("empty search box")
    lat = build_lattice(mm, pts, config.tol, config.max_bits)
    F = faltings_height(mm, config.tol, entry.label, config.max_bits)
    rep = regulator(lat, config.search_bound)
    return scan_lattice(lat, F.hF_plus, box, config.ls_seed, rep.minima_sq,
                        mm, torsion_points(mm.curve), config.tol)


def _generators_on_minimal(entry: CorpusEntry, mm) -> list[CurvePoint]:
    return [CurvePoint.of(*mm.to_minimal(x, y)) for x, y in entry.generators]


# -- report ----------------------------------------------------------------

@dataclass
class CurveReport:
    label: str
    input_ainvs: list[str]
    minimal_ainvs: list[str] | None = None
    disc_min: str | None = None
    N0: str | None = None
    reduction: list[str] | None = None
    log_N0: ErrReal | None = None
    log_Nst: ErrReal | None = None
    log_Nuns: ErrReal | None = None
    tau_re: ErrReal | None = None
    tau_im: ErrReal | None = None
    hF_plus: ErrReal | None = None
    hF_classical: ErrReal | None = None
    rho: ErrReal | None = None
    rho_sq_inv: ErrReal | None = None
    disc_identity_residual: ErrReal | None = None
    known_rank: int | None = None
    m: int = 0
    torsion_order: int | None = None
    reg_L: ErrReal | None = None
    reg_poincare: ErrReal | None = None
    minima_sq: list[ErrReal] = field(default_factory=list)
    rank_bound: ErrReal | None = None
    ls_ratio: ErrReal | None = None
    ls_lambda1_ratio: ErrReal | None = None
    ls_minimizer: list[int] | None = None
    m0: int = 0
    zariski_rank: int | None = None
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        """Fixed key order; every ball as {value, err, bits}."""
        ball = errreal_to_json
        return {
            "label": self.label,
            "input_ainvs": self.input_ainvs,
            "minimal_ainvs": self.minimal_ainvs,
            "disc_min": self.disc_min,
            "N0": self.N0,
            "reduction": self.reduction,
            "log_N0": ball(self.log_N0),
            "log_Nst": ball(self.log_Nst),
            "log_Nuns": ball(self.log_Nuns),
            "tau_re": ball(self.tau_re),
            "tau_im": ball(self.tau_im),
            "hF_plus": ball(self.hF_plus),
            "hF_classical": ball(self.hF_classical),
            "rho": ball(self.rho),
            "rho_sq_inv": ball(self.rho_sq_inv),
            "disc_identity_residual": ball(self.disc_identity_residual),
            "known_rank": self.known_rank,
            "m": self.m,
            "torsion_order": self.torsion_order,
            "reg_L": ball(self.reg_L),
            "reg_poincare": ball(self.reg_poincare),
            "minima_sq": [ball(x) for x in self.minima_sq],
            "rank_bound": ball(self.rank_bound),
            "ls_ratio": ball(self.ls_ratio),
            "ls_lambda1_ratio": ball(self.ls_lambda1_ratio),
            "ls_minimizer": self.ls_minimizer,
            "m0": self.m0,
            "zariski_rank": self.zariski_rank,
            "dictionary": {
                "dimension_g": 1,
                "degree_d": 1,
                "faltings_height": ball(self.hF_plus),
                "regulator": ball(self.reg_poincare),
                "max_subrank_m0": self.m0,
                "mordell_weil_rank": self.m if self.reg_L is not None else self.known_rank,
                "zariski_rank": self.zariski_rank,
                "zariski_dense": None if self.zariski_rank is None else self.zariski_rank > 0,
            },
            "verdicts": {name: _verdict_json(self.verdicts.get(name)) for name in VERDICTS},
            "errors": dict(sorted(self.errors.items())),
        }


def _verdict_json(v: Verdict | None) -> dict:
    if v is None:
        v = Verdict.skipped()
    return {"status": v.status.value, "slack": errreal_to_json(v.slack), "detail": v.detail}


# -- pipeline --------------------------------------------------------------

def _decide(check, tol):
    """Run ``check(tol)``; one retry at doubled precision if Inconclusive."""
    v = check(tol)
    if v.status is Status.INCONCLUSIVE:
        v = check(tol * tol)
    return v


class _Stages:
    """Memoized stage results keyed by tolerance; failures are recorded once."""

    def __init__(self, entry: CorpusEntry, config: Config, report: CurveReport):
        self.entry, self.config, self.report = entry, config, report
        self.cache = {}

    def get(self, name, tol, fn):
        key = (name, tol)
        if key not in self.cache:
            try:
                self.cache[key] = (fn(tol), None)
            except EcFaltingsError as exc:
                self.cache[key] = (None, exc)
                self.report.errors.setdefault(name, f"{type(exc).__name__}: {exc}")
        value, exc = self.cache[key]
        if exc is not None:
            raise exc
        return value


def run_pipeline(entry: CorpusEntry, config: Config = Config()) -> CurveReport:
    report = CurveReport(entry.label, [format_rational(a) for a in entry.ainvs],
                         known_rank=entry.known_rank)
    try:
        mm = minimal_model(invariants(*entry.ainvs))
    except (EcFaltingsError, ArithmeticError) as exc:
        report.errors["model"] = f"{type(exc).__name__}: {exc}"
        report.verdicts = {name: Verdict.errored(exc) for name in VERDICTS}
        return report
    report.minimal_ainvs = [format_rational(a) for a in mm.curve.ainvs]
    report.disc_min = str(mm.disc_min)
    report.torsion_order = len(torsion_points(mm.curve))
    cfg = config
    stages = _Stages(entry, cfg, report)

    def norms(_tol):
        return conductor_norms(mm, bits=128)

    def falt(tol):
        return faltings_height(mm, tol, entry.label, cfg.max_bits)

    def lattice(tol):
        pts = _generators_on_minimal(entry, mm)
        return build_lattice(mm, pts, tol, cfg.max_bits)

    def reg(tol):
        return regulator(stages.get("lattice", tol, lattice), cfg.search_bound)

    tol = cfg.tol
    try:
        N = stages.get("conductor", tol, norms)
        report.N0 = str(N.N0)
        report.reduction = [f"{p}:{k.value}" for p, k in N.factorizations]
        report.log_N0, report.log_Nst, report.log_Nuns = N.log_N0, N.log_Nst, N.log_Nuns
    except EcFaltingsError:
        pass
    try:
        F = stages.get("faltings", tol, falt)
        report.tau_re, report.tau_im = F.tau.re, F.tau.im
        report.hF_plus, report.hF_classical = F.hF_plus, F.hF_classical
        report.rho, report.rho_sq_inv = F.rho, F.rho_sq_inv
    except EcFaltingsError:
        pass
    try:
        report.disc_identity_residual = stages.get(
            "discriminant_identity", None, lambda _t: discriminant_identity_residual(mm, IDENTITY_BITS))
    except EcFaltingsError:
        pass
    report.m = len(entry.generators)
    try:
        R = stages.get("lattice_regulator", tol, reg)
        report.reg_L, report.reg_poincare = R.reg_L, R.reg_poincare
        report.minima_sq = list(R.minima_sq)
        report.m0, report.zariski_rank = R.m0, R.zariski_rank
    except EcFaltingsError:
        pass

    def guarded(name, check):
        if name not in cfg.checks:
            return Verdict.skipped("not selected")
        try:
            return _decide(check, tol)
        except EcFaltingsError as exc:
            return Verdict.errored(exc)

    report.verdicts["height_conductor"] = guarded("height_conductor", lambda t: height_conductor_check(
        stages.get("faltings", t, falt), stages.get("conductor", tol, norms).log_N0))
    report.verdicts["matrix_lemma"] = guarded("matrix_lemma", lambda t: matrix_lemma_check(
        stages.get("faltings", t, falt)))

    try:
        report.rank_bound = rank_bound(RankBoundInputs(1, 1, stages.get("conductor", tol, norms).log_N0))
    except EcFaltingsError:
        pass
    if entry.known_rank is None:
        report.verdicts["rank_bound"] = Verdict.skipped("no known rank")
    else:
        report.verdicts["rank_bound"] = guarded("rank_bound", lambda t: Verdict.from_slack(
            rank_bound(RankBoundInputs(1, 1, stages.get("conductor", tol, norms).log_N0))
            - entry.known_rank, "rank bound - known rank"))
    report.verdicts["minkowski"] = guarded("minkowski", lambda t: minkowski_check(
        stages.get("lattice_regulator", t, reg)))
    report.verdicts["hadamard"] = guarded("hadamard", lambda t: hadamard_check(
        stages.get("lattice", t, lattice)))

    if "ls" in cfg.checks and entry.generators:
        try:
            lat = stages.get("lattice", tol, lattice)
            R = stages.get("lattice_regulator", tol, reg)
            F = stages.get("faltings", tol, falt)
            ls = scan_lattice(lat, F.hF_plus, cfg.ls_box, cfg.ls_seed, R.minima_sq)
            report.ls_ratio, report.ls_lambda1_ratio = ls.ratio, ls.lambda1_ratio
            report.ls_minimizer = list(ls.minimizer)
        except EcFaltingsError as exc:
            report.errors.setdefault("ls", f"{type(exc).__name__}: {exc}")
    return report


def run_corpus(entries, config: Config = Config()) -> list[CurveReport]:
    """Reports in input order; ``config.jobs`` > 1 evaluates entries in parallel."""
    entries = list(entries)
    if config.jobs <= 1 or len(entries) <= 1:
        return [run_pipeline(e, config) for e in entries]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(partial(run_pipeline, config=config), entries))

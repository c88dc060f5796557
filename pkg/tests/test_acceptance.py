"""Acceptance criteria; each test prints one PASS/FAIL line (see conftest)."""

import itertools
import random
import time
from fractions import Fraction

import mpmath
import pytest
import sympy
from mpmath import mp, mpf

from ecfaltings.bounds import (
    RankBoundInputs, headline_rank_constant, prop33_constants, prop36_constants, rank_bound,
    thm11_constants, tower_compare,
)
from ecfaltings.errreal import ErrReal, to_fraction
from ecfaltings.faltings import discriminant_identity_residual, faltings_height
from ecfaltings.harness import Config, run_corpus
from ecfaltings.harness.cli import main
from ecfaltings.heights import canonical_height, canonical_height_doubling_oracle
from ecfaltings.lattice import build_lattice, minkowski_check, regulator
from ecfaltings.points import CurvePoint, point_mul

from conftest import curve

TOL = mpf(10) ** -9


@pytest.fixture(scope="module")
def corpus_run(corpus):
    start = time.perf_counter()
    reports = run_corpus(corpus, Config(tol=TOL))
    return reports, time.perf_counter() - start


@pytest.fixture(scope="module")
def fixture_lattices(corpus, corpus_models):
    out = []
    for e in corpus:
        if e.generators:
            mm = corpus_models[e.label]
            pts = [CurvePoint.of(*mm.to_minimal(x, y)) for x, y in e.generators]
            out.append((e.label, build_lattice(mm, pts, mpf(10) ** -20)))
    return out


def test_criterion_01_height_conductor(corpus_run, record_property):
    """1. height-conductor inequality on the corpus, tol 1e-9, runtime < 30 s"""
    reports, elapsed = corpus_run
    assert len(reports) >= 20
    low = None
    for r in reports:
        v = r.verdicts["height_conductor"]
        assert v.status.value == "Pass", r.label
        assert v.slack.lower > 0 and v.slack.err <= TOL, r.label
        low = v.slack if low is None or v.slack.value < low.value else low
    record_property("detail", f"{len(reports)} curves, min slack {mpmath.nstr(low.value, 6)}, "
                              f"{elapsed:.1f} s")
    assert elapsed < 30


def test_criterion_02_cm_closed_form(record_property):
    """2. hF+(y^2 = x^3 - x) equals the eta(i) closed form within 1e-10"""
    F = faltings_height(curve(0, 0, 0, -1, 0), mpf(10) ** -30)
    with mp.workprec(256):
        closed = -2 * mpmath.log(mpmath.gamma(mpf(1) / 4) / (2 * mp.pi ** (mpf(3) / 4)))
        diff = abs(F.hF_plus.value - closed) + F.hF_plus.err
    record_property("detail", f"|diff| <= {mpmath.nstr(diff, 3)}")
    assert diff <= mpf(10) ** -10


def test_criterion_03_discriminant_identity(corpus, corpus_models, record_property):
    """3. discriminant identity residual <= 1e-20 at 256 bits on every corpus curve"""
    worst = mpf(0)
    for e in corpus:
        r = discriminant_identity_residual(corpus_models[e.label], 256)
        assert r.prec == 256
        with mp.workprec(256):
            worst = max(worst, abs(r.value) + r.err)
    record_property("detail", f"worst residual bound {mpmath.nstr(worst, 3)}")
    assert worst <= mpf(10) ** -20


def test_criterion_04_matrix_lemma(corpus_run, record_property):
    """4. matrix lemma rho^-2 <= 16 hF+ + 39 with certified slack on every corpus curve"""
    reports, _ = corpus_run
    for r in reports:
        v = r.verdicts["matrix_lemma"]
        assert v.status.value == "Pass" and v.slack.lower > 0, r.label
        with mp.workprec(128):
            direct = 16 * r.hF_plus + 39 - r.rho_sq_inv
            assert direct.overlaps(v.slack)
    record_property("detail", f"{len(reports)} curves")


def test_criterion_05_oracle_equivalence(fixture_points, record_property):
    """5. local-decomposition height vs doubling oracle (radii <= 1e-8) and quadraticity"""
    worst_gap = worst_radius = worst_quad = mpf(0)
    for label, mm, P in fixture_points:
        local = canonical_height(mm, P, mpf(10) ** -20).value
        oracle = canonical_height_doubling_oracle(mm, P, 12)
        with mp.workprec(128):
            gap = abs(local.value - oracle.value)
            radius = local.err + oracle.err
            assert gap <= radius, label
            worst_gap, worst_radius = max(worst_gap, gap), max(worst_radius, radius)
            for n in (2, 3, 5):
                hn = canonical_height(mm, point_mul(mm.curve, n, P), mpf(10) ** -20).value
                q = abs(hn.value - n * n * local.value) + hn.err + n * n * local.err
                assert q <= n * n * mpf(10) ** -8, (label, n)
                worst_quad = max(worst_quad, q / (n * n))
    record_property("detail", f"{len(fixture_points)} points agree, max gap {mpmath.nstr(worst_gap, 3)}, "
                              f"quadraticity <= {mpmath.nstr(worst_quad, 3)} n^2, "
                              f"max combined radius {mpmath.nstr(worst_radius, 3)} vs 1e-8 "
                              f"(oracle capped at 12 doublings)")
    assert worst_radius <= mpf(10) ** -8


def _random_unimodular(m, rng):
    while True:
        U = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(m)]
        if abs(sympy.Matrix(U).det()) == 1:
            return U


def test_criterion_06_regulator_identities(corpus, corpus_models, fixture_lattices, record_property):
    """6. Reg_L = 1 at m = 0, Reg_poincare = 2^m Reg_L exactly, unimodular invariance"""
    for e in corpus:
        if not e.generators:
            r = regulator(build_lattice(corpus_models[e.label], []))
            assert r.reg_L.value == 1 and r.reg_L.err == 0
            assert r.reg_poincare.value == 1 and r.reg_poincare.err == 0
    rng = random.Random(20)
    count = 0
    for label, lat in fixture_lattices:
        base = regulator(lat)
        m = lat.m
        assert base.reg_poincare.value == mpmath.ldexp(base.reg_L.value, m), label
        assert base.reg_poincare.err == mpmath.ldexp(base.reg_L.err, m), label
        for _ in range(20):
            U = _random_unimodular(m, rng)
            other = regulator(lat.transform(U))
            assert other.reg_L.overlaps(base.reg_L), label
            assert all(a.overlaps(b) for a, b in zip(other.minima_sq, base.minima_sq)), label
            count += 1
    record_property("detail", f"{len(fixture_lattices)} lattices, {count} transforms")


def _brute_minima(lat, box):
    m = lat.m
    G = [[to_fraction(v.value) for v in row] for row in lat.gram]
    den = 1
    for row in G:
        for x in row:
            den = den * x.denominator // sympy.gcd(den, x.denominator)
    Gi = [[int(x * den) for x in row] for row in G]
    vecs = sorted((sum(v[i] * v[j] * Gi[i][j] for i in range(m) for j in range(m)), v)
                  for v in itertools.product(range(-box, box + 1), repeat=m) if any(v))
    chosen, out = [], []
    for q, v in vecs:
        if sympy.Matrix(chosen + [list(v)]).rank() > len(chosen):
            chosen.append(list(v))
            out.append(Fraction(q, den))
            if len(chosen) == m:
                break
    return out


def test_criterion_07_minkowski(fixture_lattices, record_property):
    """7. Minkowski chain on fixture lattices; minima equal brute force over |n_i| <= 50"""
    for label, lat in fixture_lattices:
        rep = regulator(lat)
        assert minkowski_check(rep).status.value == "Pass", label
        assert lat.m <= 3
        expected = _brute_minima(lat, 50)
        assert len(expected) == len(rep.minima_sq)
        assert all(g.contains(x) for g, x in zip(rep.minima_sq, expected)), label
    record_property("detail", f"{len(fixture_lattices)} lattices, ranks "
                              f"{sorted({lat.m for _, lat in fixture_lattices})}")


def test_criterion_08_rank_bound(corpus_run, record_property):
    """8. rank bound >= known rank on the corpus; bound(37) ~ 4.4e3; c4(1,1) = 12^12"""
    reports, _ = corpus_run
    for r in reports:
        assert r.known_rank is not None, r.label
        assert r.verdicts["rank_bound"].status.value == "Pass", r.label
        assert r.rank_bound.lower >= r.known_rank
    b37 = rank_bound(RankBoundInputs(1, 1, ErrReal.log_of(37, 128)))
    with mp.workprec(128):
        assert abs(b37.value - (1024 * mpmath.log(37) + 256 * mpmath.log(16))) <= b37.err + mpf(10) ** -25
    assert round(float(b37.value), -2) == 4400
    assert headline_rank_constant(1, 1).exact == 12 ** 12
    record_property("detail", f"bound(37) = {mpmath.nstr(b37.value, 8)}")


def test_criterion_09_constants(record_property):
    """9. c(1) = 12^-12, -log c(g) increasing for g <= 6, jacobian constants"""
    c, _ = thm11_constants(1)
    assert c.exact == Fraction(1, 12 ** 12)
    neg_logs = [-thm11_constants(g)[0].log_abs() for g in range(1, 7)]
    assert all(tower_compare(a, b) == -1 for a, b in zip(neg_logs, neg_logs[1:]))
    c5, c6 = prop33_constants(1, jacobian=True)
    c16, c17 = prop36_constants(1, jacobian=True)
    assert (c5.exact, c6.exact) == (Fraction(1, 12), 0)
    assert (c16.exact, c17.exact) == (Fraction(1, 12 ** 5), 0)
    record_property("detail", "g = 1..6")


def test_criterion_10_determinism(tmp_path, record_property):
    """10. --jobs 1 and --jobs 8 give byte-identical reports"""
    a, b = tmp_path / "jobs1.jsonl", tmp_path / "jobs8.jsonl"
    assert main(["--out", str(a), "--jobs", "1", "--no-plots"]) == 0
    assert main(["--out", str(b), "--jobs", "8", "--no-plots"]) == 0
    data = a.read_bytes()
    record_property("detail", f"{len(data)} bytes")
    assert data == b.read_bytes()

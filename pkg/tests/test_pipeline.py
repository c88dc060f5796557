from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from ecfaltings import invariants, minimal_model
from ecfaltings.errors import NoGenerators
from ecfaltings.harness import VERDICTS, Config, CorpusEntry, ls_scan, run_pipeline
from ecfaltings.heights import canonical_height
from ecfaltings.points import CurvePoint, point_add, point_mul, torsion_points

HF_37A1 = "0.494761268492005680905479968511"
HF_32A2 = "0.527344140497835965308384389507"
F = Fraction


def entry(label, ainvs, gens=(), rank=None):
    return CorpusEntry(label, tuple(F(a) for a in ainvs),
                       tuple((F(x), F(y)) for x, y in gens), rank)


E37 = entry("37a1", (0, 0, 1, -1, 0), [(0, 0)], 1)
E32 = entry("32a2", (0, 0, 0, -1, 0), (), 0)


def status(report, name):
    return report.verdicts[name].status.value


def test_37a1():
    r = run_pipeline(E37)
    assert all(status(r, v) == "Pass" for v in VERDICTS)
    assert r.errors == {}
    with mp.workprec(128):
        slack = r.verdicts["height_conductor"].slack
        assert abs(slack.value - (mpf(HF_37A1) - mpmath.log(37) / 12)) <= slack.err + mpf(10) ** -25
        assert abs(r.rank_bound.value - mpf("4407.4")) < mpf("0.1")
        assert r.verdicts["rank_bound"].slack.value > 4406
    assert r.N0 == "37" and r.reduction == ["37:Multiplicative"]
    assert r.ls_minimizer == [1]


def test_all_radii_within_tolerance():
    cfg = Config(tol=mpf(10) ** -12)
    r = run_pipeline(E37, cfg)
    balls = [r.log_N0, r.hF_plus, r.hF_classical, r.rho, r.tau_im, r.reg_L, r.reg_poincare,
             *r.minima_sq, r.ls_ratio] + [v.slack for v in r.verdicts.values() if v.slack]
    assert all(b.err <= cfg.tol for b in balls)


def test_x3_minus_x():
    r = run_pipeline(E32)
    assert r.reg_L.value == 1 and r.reg_L.err == 0
    assert status(r, "minkowski") == "Pass"
    assert status(r, "height_conductor") == "Pass"
    with mp.workprec(128):
        slack = r.verdicts["height_conductor"].slack
        assert abs(slack.value - (mpf(HF_32A2) - mpmath.log(2) / 12)) <= slack.err + mpf(10) ** -25
        assert abs(slack.value - (mpf("0.5273") - mpf("0.0578"))) < mpf("0.0001")
    assert r.ls_ratio is None and "ls" not in r.errors


def test_hF_classical_offset():
    r = run_pipeline(E32)
    with mp.workprec(128):
        d = r.hF_plus.value - r.hF_classical.value - mpmath.log(2 * mp.pi ** 2) / 2
        assert abs(d) <= r.hF_plus.err + r.hF_classical.err + mpf(10) ** -30


def test_dependent_generators_errored_but_rest_reported():
    mm = minimal_model(invariants(0, 0, 1, -1, 0))
    P = CurvePoint.of(F(0), F(0))
    Q = point_mul(mm.curve, 2, P)
    e = entry("37a1x2", (0, 0, 1, -1, 0), [(0, 0), (Q.x, Q.y)], 2)
    r = run_pipeline(e)
    assert status(r, "minkowski") == "Errored"
    assert "DegenerateLattice" in r.verdicts["minkowski"].detail
    assert "DegenerateLattice" in r.errors["lattice_regulator"]
    assert status(r, "height_conductor") == "Pass"
    assert status(r, "matrix_lemma") == "Pass"
    assert status(r, "rank_bound") == "Pass"
    assert r.hF_plus is not None and r.reg_L is None


def test_singular_entry_errors_every_verdict():
    r = run_pipeline(entry("node", (0, 1, 0, 0, 0)))
    assert "SingularCurve" in r.errors["model"]
    assert all(status(r, v) == "Errored" for v in VERDICTS)
    assert list(r.to_json()["verdicts"]) == list(VERDICTS)


def test_rank_bound_skipped_without_known_rank():
    r = run_pipeline(entry("37a1", (0, 0, 1, -1, 0), [(0, 0)]))
    assert status(r, "rank_bound") == "Skipped"
    assert r.rank_bound is not None


def test_checks_selection():
    r = run_pipeline(E37, Config(checks=frozenset({"height_conductor"})))
    assert status(r, "height_conductor") == "Pass"
    assert status(r, "matrix_lemma") == "Skipped"
    assert r.ls_ratio is None


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        Config(checks=frozenset({"nope"}))


def test_fixed_key_order():
    a = run_pipeline(E37).to_json()
    b = run_pipeline(E32).to_json()
    assert list(a) == list(b)
    assert list(a)[:3] == ["label", "input_ainvs", "minimal_ainvs"]
    assert list(a)[-2:] == ["verdicts", "errors"]
    assert list(a["dictionary"]) == list(b["dictionary"])


def test_dictionary_columns():
    d = run_pipeline(E37).to_json()["dictionary"]
    assert d["dimension_g"] == 1 and d["degree_d"] == 1
    assert d["mordell_weil_rank"] == 1 and d["zariski_rank"] == 1 and d["zariski_dense"] is True
    assert d["regulator"]["value"].startswith("0.05111140823996")


# -- Lang-Silverman scan ---------------------------------------------------

def test_ls_rank_one_minimizer_is_generator():
    res = ls_scan(E37, 5)
    assert res.minimizer == (1,)
    mm = minimal_model(invariants(0, 0, 1, -1, 0))
    h = canonical_height(mm, CurvePoint.of(F(0), F(0)), mpf(10) ** -20).value
    assert abs(res.min_height.value - h.value) <= res.min_height.err + h.err
    # hF+ < 1 for 37a1, so the ratio is the height itself
    assert abs(res.ratio.value - h.value) <= res.ratio.err + h.err


def test_ls_brute_force_rank_one():
    # independent re-enumeration through point arithmetic
    mm = minimal_model(invariants(0, 0, 1, -1, 0))
    P = CurvePoint.of(F(0), F(0))
    hs = [canonical_height(mm, point_mul(mm.curve, n, P), mpf(10) ** -15).value for n in range(1, 6)]
    best = min(range(5), key=lambda i: hs[i].value)
    assert best == 0
    assert abs(ls_scan(E37, 5).min_height.value - hs[0].value) < mpf(10) ** -14


def test_ls_empty_box():
    with pytest.raises(NoGenerators):
        ls_scan(E37, 0)
    with pytest.raises(NoGenerators):
        ls_scan(E32, 3)


def test_ls_torsion_coset():
    e = entry("y2=x3-36x", (0, 0, 0, -36, 0), [(-3, 9)], 1)
    res = ls_scan(e, 3)
    mm = minimal_model(invariants(*e.ainvs))
    tors = torsion_points(mm.curve)
    assert len(tors) == 4
    assert abs(res.coset_min.value - res.min_height.value) <= res.coset_min.err + res.min_height.err + mpf(10) ** -12
    # brute force over n P + T for every torsion T
    P = CurvePoint.of(*mm.to_minimal(F(-3), F(9)))
    vals = [canonical_height(mm, point_add(mm.curve, point_mul(mm.curve, n, P), T), mpf(10) ** -12).value
            for n in (1, 2, 3) for T in tors]
    low = min(vals, key=lambda h: h.value)
    assert abs(low.value - res.min_height.value) <= low.err + res.min_height.err + mpf(10) ** -12


@pytest.mark.parametrize("label", ["389a1", "5077a1", "y2=x3+17"])
def test_ls_shuffled_order_same_minimum(corpus, label):
    e = next(x for x in corpus if x.label == label)
    box = 3
    base = ls_scan(e, box, Config(ls_seed=None))
    for seed in (1, 7):
        other = ls_scan(e, box, Config(ls_seed=seed))
        assert other.minimizer == base.minimizer
        assert other.min_height.value == base.min_height.value


def test_ls_minimizer_is_first_minimum(corpus):
    e = next(x for x in corpus if x.label == "5077a1")
    res = ls_scan(e, 2)
    # hF+ < 1 here, so lambda_1^2 / max{1, hF+} is lambda_1^2 itself
    with mp.workprec(128):
        assert abs(res.min_height.value - res.lambda1_ratio.value) <= 4 * res.min_height.err


def test_corpus_heights_and_matrix_lemma_all_pass(corpus):
    for e in corpus:
        r = run_pipeline(e, Config(checks=frozenset({"height_conductor", "matrix_lemma"})))
        assert status(r, "height_conductor") == "Pass", e.label
        assert status(r, "matrix_lemma") == "Pass", e.label

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from ecfaltings import invariants, minimal_model
from ecfaltings.harness.cli import bundled_corpus
from ecfaltings.harness.corpus import ingest

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def curve(*ainvs):
    return minimal_model(invariants(*ainvs))


@pytest.fixture(scope="session")
def corpus():
    return ingest(bundled_corpus())


@pytest.fixture(scope="session")
def corpus_models(corpus):
    return {e.label: curve(*e.ainvs) for e in corpus}


@pytest.fixture(scope="session")
def fixture_points(corpus, corpus_models):
    """(label, model, point) for every corpus generator, mapped to the minimal model."""
    from ecfaltings.points import CurvePoint
    out = []
    for e in corpus:
        mm = corpus_models[e.label]
        for x, y in e.generators:
            out.append((e.label, mm, CurvePoint.of(*mm.to_minimal(Fraction(x), Fraction(y)))))
    return out


# -- acceptance summary: one PASS/FAIL line per criterion ------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        title = (item.function.__doc__ or item.name).strip()
        detail = dict(item.user_properties).get("detail", "")
        line = f"{'PASS' if rep.passed else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

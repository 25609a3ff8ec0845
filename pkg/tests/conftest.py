import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from specset.spaces import Leaf, Sum

settings.register_profile(
    "specset",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("specset")

ORACLES = json.loads((Path(__file__).parent / "oracle_values.json").read_text())

P_VALUES = st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf])


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


def leaves(max_dim=3, ps=P_VALUES):
    return st.builds(Leaf, st.integers(1, max_dim), ps)


def norm_trees(max_leaves=3, max_dim=2, ps=P_VALUES):
    """Random trees of depth <= 2 with at most ``max_leaves`` leaves at each level."""
    leaf = leaves(max_dim, ps)
    node = st.builds(lambda kids, p: Sum(tuple(kids), p),
                     st.lists(leaf, min_size=1, max_size=max_leaves), ps)
    return st.one_of(leaf, node,
                     st.builds(lambda kids, p: Sum(tuple(kids), p),
                               st.lists(st.one_of(leaf, node), min_size=1, max_size=2), ps))


def hilbert_trees(max_dim=3):
    return norm_trees(max_leaves=3, max_dim=max_dim, ps=st.just(2.0))


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = (report.outcome.upper(), dict(report.user_properties).get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        outcome, detail = _ACCEPTANCE[name]
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"criterion {name.split('_')[2]}: {verdict}  {detail}")

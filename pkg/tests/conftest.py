import re

import numpy as np
import pytest

from clusterout.bench import random_instance
from clusterout.exact import solve_exact
from clusterout.search import SearchConfig, local_search

# criterion number -> list of note strings, filled by the acceptance tests
ACCEPTANCE_NOTES = {}
_OUTCOMES = {}
_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.fixture(scope="session")
def warm_jit():
    """Compile (or load from cache) every numba kernel before timed sections."""
    inst = random_instance(0, 12, 6, k=2, z=2)
    local_search(inst, SearchConfig(rho=2))
    solve_exact(inst)
    ufl = random_instance(1, 8, 4, z=1)
    solve_exact(ufl)
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def note(criterion, text):
    ACCEPTANCE_NOTES.setdefault(int(criterion), []).append(text)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES.setdefault(int(m.group(1)), []).append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_OUTCOMES):
        status = "PASS" if all(_OUTCOMES[c]) else "FAIL"
        tr.write_line(f"criterion {c}: {status}")
        for text in ACCEPTANCE_NOTES.get(c, []):
            tr.write_line(f"    {text}")

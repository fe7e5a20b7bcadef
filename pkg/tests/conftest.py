import re

import numpy as np
import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results = {}


def random_density(nqubits, rng, rank=None):
    dim = 2**nqubits
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome == "failed":
        ok = report.outcome == "passed"
        key = int(m.group(1))
        _results.setdefault(key, []).append((report.nodeid.split("::")[-1], ok))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_results):
        parts = _results[key]
        ok = all(p for _, p in parts)
        failed = [name for name, p in parts if not p]
        suffix = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}{suffix}")

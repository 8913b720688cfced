import math

import numpy as np
import pytest

from bellsweep.states import DensityMatrix, PureState, haar_random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pure(dims, rng):
    n = math.prod(dims)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(v / np.linalg.norm(v), tuple(dims))


def random_density(dims, rng, rank=None):
    n = math.prod(dims)
    rank = rank or n
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, tuple(dims))


def random_separable(dims, rng, terms=4):
    """Convex mixture of random product pure states."""
    probs = rng.dirichlet(np.ones(terms))
    rho = 0
    for p in probs:
        vec = np.ones(1, dtype=complex)
        for d in dims:
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            vec = np.kron(vec, v / np.linalg.norm(v))
        rho = rho + p * np.outer(vec, vec.conj())
    return DensityMatrix(rho, tuple(dims))


def local_unitary(dims, rng):
    u = np.ones((1, 1), dtype=complex)
    for d in dims:
        u = np.kron(u, haar_random_unitary(d, rng))
    return u


def _acceptance_lines(config):
    return getattr(config, "_acceptance_lines", None)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = _acceptance_lines(config)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config._acceptance_lines

    class Recorder:
        def __init__(self):
            self.detail = ""

        def note(self, text):
            self.detail = text

    rec = Recorder()
    yield rec
    report = getattr(request.node, "rep_call", None)
    status = "PASS" if report is not None and report.passed else "FAIL"
    lines.append(f"{status}  {request.node.name}  {rec.detail}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep

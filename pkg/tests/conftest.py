import numpy as np
import pytest

from graphase.experiments import sample_gnp
from graphase.graph import Graph, build_hamiltonian, is_connected
from graphase.spectral import eigendecompose


def random_connected(n, p, rng):
    while True:
        g = sample_gnp(n, p, rng)
        if is_connected(g):
            return g


def random_instance(n, rng, p=0.5, potential=True):
    g = random_connected(n, p, rng)
    w = rng.uniform(0, 1, n) if potential else np.zeros(n)
    h = build_hamiltonian(g, w)
    return g, w, h, eigendecompose(h)


def complex_normal(n, rng):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def p3():
    return Graph.path(3)


@pytest.fixture
def k3():
    return Graph.complete(3)


@pytest.fixture
def p3_system(p3):
    return eigendecompose(build_hamiltonian(p3))


ACCEPTANCE_LINES = []


def record_criterion(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

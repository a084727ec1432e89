import numpy as np
import pytest

from holevo_recovery.numkernel import BipartiteShape
from holevo_recovery.states import random_density, random_positive

ACCEPTANCE_LINES = []


def record_criterion(number, name, passed, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20171015)


@pytest.fixture
def qubit_pair():
    return BipartiteShape(2, 2)


def bipartite_instance(seed, shape=BipartiteShape(2, 2), epsilon=1e-3, rank=None):
    d = shape.dim
    rho = random_density(d, rank or d, (seed, 1))
    sigma = random_positive(d, (seed, 2), epsilon=epsilon)
    return rho, sigma

import math

import numpy as np
import pytest
from hypothesis import settings

import oracles
from sisext.model import GAUSS, SECH, finite_spec

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def oracle():
    table = oracles.load()
    return lambda key: oracles.value(key, table)


def f_sigma(sigma, a=1.0, normalize=False):
    """G_a(x - 1) - sigma G_a(x + 1)."""
    return finite_spec(GAUSS, a, {1: 1.0, -1: -complex(sigma)}, normalize=normalize)


def single(kind, a=1.0, normalize=False):
    nodes = [0.0] if kind == SECH else None
    return finite_spec(kind, a, {0: 1.0}, nodes=nodes, normalize=normalize)


def random_secant(rng, max_nodes=8, sep=0.3, span=4.0):
    """Explicit-node secant spec with nonzero coefficients, |c| <= 1."""
    m = int(rng.integers(1, max_nodes + 1))
    while True:
        pts = np.sort(rng.uniform(-span, span, m))
        if m == 1 or np.min(np.diff(pts)) >= sep:
            break
    vals = {}
    for p in pts:
        r = rng.uniform(0.1, 1.0)
        vals[float(p)] = r * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))
    return finite_spec(SECH, float(rng.uniform(0.5, 2.0)), vals, nodes=[float(p) for p in pts])


def random_gauss(rng, width=21):
    lo = int(rng.integers(-10, 1))
    n = int(rng.integers(1, width + 1))
    vals = {k: complex(*rng.normal(size=2)) for k in range(lo, lo + n)}
    return finite_spec(GAUSS, float(rng.uniform(0.5, 1.5)), vals)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from schwarz1d import Cluster, Domain, catalog, decompose, initial_condition

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def small_domain(dx=0.05, T=0.01, dt=0.001, a0=-4.0, b0=4.0):
    return Domain(a0, b0, T, dt, dx)


def prepared_cluster(decomp, potential="neg_x2", p=5.0, n=1, workers=1, u=None):
    spec = catalog(potential) if isinstance(potential, str) else potential
    cl = Cluster(decomp, spec, decomp.domain.dt, p, workers=workers)
    u = [initial_condition(m.nodes) for m in decomp.meshes] if u is None else u
    cl.prepare(n, u)
    return cl


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cluster4():
    """N=4 on (-4, 4) with 20 cells per subdomain, V = -x^2, p = 5."""
    dec = decompose(small_domain(dx=0.1), 4)
    with prepared_cluster(dec) as cl:
        yield cl

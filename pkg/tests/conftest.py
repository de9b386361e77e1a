import numpy as np
import pytest

from h2index.graph import from_edges

from . import oracles


def build(edges, n=None):
    return from_edges(np.asarray(edges, dtype=np.int64).reshape(-1, 2), n=n)


def random_suite(count=200, nmax=200, seed=20240501):
    """Mixed G(n, p) and preferential-attachment graphs with n <= nmax."""
    rng = np.random.default_rng(seed)
    suite = []
    for i in range(count):
        n = int(rng.integers(5, nmax + 1))
        if i % 2 == 0:
            p = float(rng.uniform(0.5, 8.0)) / n
            edges = oracles.erdos_renyi(n, p, rng)
        else:
            m = int(rng.integers(1, 5))
            n = max(n, m + 2)
            edges = oracles.preferential_attachment(n, m, rng)
        suite.append((build(edges, n), oracles.adjacency(edges, n)))
    return suite


@pytest.fixture(scope="session")
def suite():
    return random_suite()


@pytest.fixture
def triangle():
    return build([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def star5():
    return build([(0, i) for i in range(1, 6)])


@pytest.fixture
def k5():
    return build([(i, j) for i in range(5) for j in range(i + 1, 5)])


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

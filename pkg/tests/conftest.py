import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def nontrivial_matrix(rng, m, n):
    """Random binary matrix whose rows each contain a 0 and a 1."""
    a = rng.integers(0, 2, size=(m, n))
    for r in range(m):
        while a[r].all() or not a[r].any():
            a[r] = rng.integers(0, 2, size=n)
    return a


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

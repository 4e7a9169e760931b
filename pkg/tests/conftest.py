import numpy as np
import pytest

from kdre.core import BandwidthSpec, GaussianSpec, GridSpec
from kdre.oracle import GaussianPair


@pytest.fixture(scope="session")
def favorable_pair():
    F = GaussianSpec([0.0, -0.5], [[0.3, 0.1], [0.1, 0.3]])
    G = GaussianSpec([0.0, 0.0], [[0.5, 0.1], [0.1, 0.5]])
    return GaussianPair(F, G)


@pytest.fixture(scope="session")
def larger_pair():
    F = GaussianSpec([0.0, -0.5], [[0.2, 0.1], [0.1, 0.2]])
    G = GaussianSpec([0.0, 0.5], [[0.2, 0.1], [0.1, 0.2]])
    return GaussianPair(F, G)


@pytest.fixture(scope="session")
def scenario_grid():
    return GridSpec([-1.5, -1.5], [1.5, 1.5], (15, 15))


@pytest.fixture(scope="session")
def bw2():
    return BandwidthSpec(0.1, (0.1,))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

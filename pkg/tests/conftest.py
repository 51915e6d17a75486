import itertools

import numpy as np
import pytest

from phonon_quench import enumerate_sector

# filled by test_acceptance.report, echoed in the terminal summary
ACCEPTANCE_LINES = []


def brute_force_states(L, N):
    """All occupation tuples with the right total, by filtering the full product."""
    return [s for s in itertools.product(range(N + 1), repeat=L) if sum(s) == N]


@pytest.fixture(scope="session")
def sector55():
    return enumerate_sector(5, 5)


@pytest.fixture(scope="session")
def sector44():
    return enumerate_sector(4, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

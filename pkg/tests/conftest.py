import math

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def ball_volume(n: float) -> float:
    """Unit n-ball volume straight from math.gamma (independent of simplexgeom.exact)."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def within_sigma(value: float, target: float, stderr: float, nsig: float = 4.0) -> bool:
    return abs(value - target) <= nsig * stderr


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def oracle_rng():
    # deliberately not a simplexgeom stream: oracles draw from their own generator
    return np.random.default_rng(20240229)

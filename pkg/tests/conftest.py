import numpy as np
import pytest
from hypothesis import settings

from permcipher.dataset import Dataset

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# five-record toy example: original X and masked Y
TOY_X = [[13, 135, 3707], [20, 52, 826], [2, 123, -1317], [15, 165, 2419], [29, 160, -1008]]
TOY_Y = [[8, 160, 3248], [20, 57, 822], [-1, 122, 248], [18, 135, 597], [29, 164, -1927]]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def toy_x():
    return Dataset(np.array(TOY_X, dtype=float))


@pytest.fixture
def toy_y():
    return Dataset(np.array(TOY_Y, dtype=float))


def tie_free(rng, n, p):
    """Continuous data; ties have probability zero but are rejected anyway."""
    while True:
        v = rng.normal(size=(n, p)) * rng.uniform(1, 100, size=p)
        if all(np.unique(v[:, j]).size == n for j in range(p)):
            return Dataset(v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

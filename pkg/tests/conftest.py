import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def step_series(n, z, beta, base=0.0):
    """Noiseless single step; `z` is the first index (1-based) of the new level."""
    x = np.full(n, base, dtype=float)
    x[z - 1 :] += beta
    return x


# one line per acceptance criterion, filled by test_acceptance.report
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

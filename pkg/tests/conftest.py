import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def random_tau(rng):
    """A point of the standard fundamental domain with Im tau in (0.87, 2)."""
    while True:
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))
        if abs(tau) >= 1.0:
            return tau


def random_point(rng, tau, lo=0.1, hi=0.9):
    return rng.uniform(lo, hi) + rng.uniform(lo, hi) * tau


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])

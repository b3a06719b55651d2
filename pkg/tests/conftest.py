import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orlicz_approx import Grid, OrliczContext, PeriodicFunction, Weight, YoungFunction

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return Grid(1024)


@pytest.fixture(scope="session")
def l2(grid):
    """power(2) with the constant weight: the Hilbert-space case."""
    return OrliczContext(YoungFunction.power(2), Weight.constant(grid))


def cos_fn(grid, m, c=1.0):
    return PeriodicFunction(grid, c * np.cos(m * grid.nodes))


def sin_fn(grid, m, c=1.0):
    return PeriodicFunction(grid, c * np.sin(m * grid.nodes))


SQRT_PI = math.sqrt(math.pi)


# -- acceptance summary -------------------------------------------------------------------

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one line per acceptance criterion; printed at the end of the run."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

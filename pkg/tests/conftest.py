import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from beltrami_lab.grid import PeriodicGrid

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "lab", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
settings.load_profile("lab")


@pytest.fixture(scope="session")
def grid64():
    return PeriodicGrid(64, 8.0)


@pytest.fixture(scope="session")
def grid256():
    return PeriodicGrid(256, 16.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def smooth_field(grid, rng, radius=1.5, band=4):
    """Random band-limited field times a bump, compactly supported in the central half."""
    from beltrami_lab.harness.common import random_probe

    return random_probe(grid, rng, radius, band=band)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)

import math

import pytest
from hypothesis import settings

from dipolephase.config import RunConfig
from dipolephase.core import BeamParams, Constants, ElectricDipoleLine, SolenoidLine

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def unit_beam():
    return BeamParams(1.0, 1.0, 1.0, 1.0)


@pytest.fixture
def unit_line():
    return ElectricDipoleLine(1.0, 0.5)


@pytest.fixture
def unit_solenoid():
    return SolenoidLine(4.0 * math.pi, 1.0, 137.036)


@pytest.fixture
def desk():
    return Constants(137.036, 1.0)


@pytest.fixture
def default_cfg():
    return RunConfig.from_flat()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

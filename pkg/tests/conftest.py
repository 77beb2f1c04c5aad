import numpy as np
import pytest
from hypothesis import settings

from holonomy_lab.conformal import ConformalStructure
from holonomy_lab.shift import ShiftSpace
from holonomy_lab.torus import validate_real_anosov

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

CAT = [[2, 1], [1, 1]]
# companion of t^3 - t^2 - 2t + 1: one stable line, two unstable lines with
# distinct rates; the high-exponent line is the snowflake case
THREE_D = [[0, 1, 0], [0, 0, 1], [-1, 2, 1]]


@pytest.fixture(scope="session")
def cat():
    return validate_real_anosov(CAT)


@pytest.fixture(scope="session")
def cat_cs(cat):
    return ConformalStructure.for_torus(cat, 0.1)


@pytest.fixture(scope="session")
def three_d():
    return validate_real_anosov(THREE_D)


@pytest.fixture(scope="session")
def three_d_cs(three_d):
    return ConformalStructure.for_torus(three_d, 0.1)


@pytest.fixture(scope="session")
def full2():
    return ShiftSpace.full(2, 2)


@pytest.fixture(scope="session")
def full2_cs(full2):
    return ConformalStructure.for_shift(full2)


@pytest.fixture(scope="session")
def golden():
    return ShiftSpace.golden_mean(2)


@pytest.fixture(scope="session")
def golden_cs(golden):
    return ConformalStructure.for_shift(golden)


def origin(splitting):
    from holonomy_lab.torus import TorusLeafPoint
    return TorusLeafPoint.from_lift(splitting, np.zeros(splitting.dimension))


# one line per acceptance criterion, printed after the run regardless of
# output capture; populated by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

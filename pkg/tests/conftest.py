import pytest

from carpetdim import RateSchedule, validate_ifs

VICSEK_PAIRS = [(0, 0), (2, 0), (0, 2), (1, 1), (2, 2)]
CORNER_PAIRS = [(0, 0), (2, 0), (0, 2)]


@pytest.fixture(scope="session")
def vicsek():
    return validate_ifs(3, VICSEK_PAIRS)


@pytest.fixture(scope="session")
def corner():
    return validate_ifs(3, CORNER_PAIRS)


@pytest.fixture(scope="session")
def two_row():
    # base-2 system with both rows inhabited
    return validate_ifs(2, [(0, 0), (1, 1), (1, 0)])


@pytest.fixture(scope="session")
def linear12():
    return RateSchedule.linear(1, 2)

import math
from fractions import Fraction as F

import pytest

from holescope import doubling, full_tent, restricted_tent, two_block


@pytest.fixture(scope="session")
def dbl():
    return doubling()


@pytest.fixture(scope="session")
def tent2():
    return full_tent()


@pytest.fixture(scope="session")
def golden_s():
    return (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="session")
def dbl_raster_512():
    from holescope.bifset import rasterize
    return rasterize(doubling(), 512, 1000)


ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one acceptance line: criterion id, PASS/FAIL (NOT MEASURED for None), detail."""
    def _record(crit, ok, detail=""):
        status = "NOT MEASURED" if ok is None else ("PASS" if ok else "FAIL")
        line = f"ACCEPTANCE {crit}: {status}  {detail}".rstrip()
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

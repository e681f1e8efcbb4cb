import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# phases at 6 Hz, n = 12, two electrodes (radians)
O1 = np.array([-2.2032, -1.9798, -2.0625, -2.2151, -2.2389, -2.0569,
               -2.2505, -2.1924, -2.1404, -2.1541, -2.1244, -2.1647])
P3 = np.array([2.1879, -0.2305, -1.6763, -1.7409, -2.8771, -1.9322,
               2.9193, 2.8651, -3.0499, -1.9783, 3.0112, -2.7492])


@pytest.fixture
def o1():
    return O1.copy()


@pytest.fixture
def p3():
    return P3.copy()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("qig", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qig")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rho_diag():
    return np.diag([0.3, 0.7]).astype(complex)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = [test_acceptance.RESULTS[k] for k in sorted(test_acceptance.RESULTS)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

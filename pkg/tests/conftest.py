import os

import pytest
from hypothesis import HealthCheck, settings

from riccati_tontine import MarketParams, MortalityParams, OdeGrid

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def mort():
    return MortalityParams(x=65, m=90, b=10, eta=0.02)


@pytest.fixture(scope="session")
def mkt():
    return MarketParams(mu=0.07, sigma=0.2)


@pytest.fixture(scope="session")
def grid():
    return OdeGrid.over(20.0)  # h = 0.001


@pytest.fixture(scope="session")
def coarse():
    return OdeGrid.over(20.0, 2000)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

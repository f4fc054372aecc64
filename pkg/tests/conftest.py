import numpy as np
import pytest

from twolayer_dg.checks import random_states
from twolayer_dg.physics import PhysicsParams


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def params():
    return PhysicsParams(g=9.81, rho1=0.9, rho2=1.0)


@pytest.fixture
def states(rng):
    def make(n, **kw):
        return random_states(rng, n, **kw)
    return make


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])

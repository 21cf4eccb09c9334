import math

import numpy as np
import pytest

from schauder_relu.expr import Func1D

# Named targets with their Lipschitz constants on [0, 1].
TARGETS = {
    "x*(1-x)": 1.0,
    "abs(x-0.5)": 1.0,
    "sin(pi*x)": math.pi,
    "exp(x)": math.e,
    "0.7": 1.0,
}

ACCEPTANCE_LINES = []


@pytest.fixture(params=list(TARGETS), ids=list(TARGETS))
def target(request):
    return Func1D.from_source(request.param, TARGETS[request.param])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

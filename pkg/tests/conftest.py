import sys

import numpy as np
import pytest

from twotemp.core_model import GasModel
from twotemp.equilibrium import MacroState


@pytest.fixture
def gas():
    return GasModel(3.0, 0.5, 0.5, 1.0, 0.05)


@pytest.fixture
def maxwell_gas():
    return GasModel(2.0, 0.0, 0.0)


@pytest.fixture
def state():
    return MacroState(1.2, (0.1, -0.2, 0.05), 1.6, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

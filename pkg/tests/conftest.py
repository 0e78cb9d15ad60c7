import numpy as np
import pytest

from rwstefan import PhysicalParams, make_grid


@pytest.fixture
def unit_params():
    return PhysicalParams.dimensionless(1.0, 1.0)


@pytest.fixture
def small_grid():
    # 20 cells, 400 steps: fast enough for property tests
    return make_grid(1.0, 0.05, 1.0, 0.5)


def assert_ledger_balanced(ledger):
    rest = sum(v for k, v in ledger.items() if k != "injected")
    assert ledger["injected"] == rest, ledger

"""Shared fixtures: benchmark states and laws used across the suite."""

import pytest

from gaspower.laxcurves import GasState
from gaspower.pressure import GammaLaw, IsothermalLaw


@pytest.fixture
def benchmark_law():
    """gamma-law kappa=1, gamma=1.4 of the two-state junction benchmark."""
    return GammaLaw(1.0, 1.4)


@pytest.fixture
def benchmark_states():
    """Left/right data of the junction benchmark."""
    return GasState(4.0, 1.0), GasState(3.0, -1.0)


@pytest.fixture
def unit_isothermal():
    return IsothermalLaw(1.0)

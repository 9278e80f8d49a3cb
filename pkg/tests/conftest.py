import numpy as np
import pytest

from diskmin import QuadraticIntegrand, make_grid


@pytest.fixture(scope="session")
def grid_small():
    return make_grid(32, 64)


@pytest.fixture(scope="session")
def grid_med():
    return make_grid(128, 256)


@pytest.fixture(scope="session")
def m_const():
    return QuadraticIntegrand.constant(3.0, 1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)

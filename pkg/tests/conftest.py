"""
Shared fixtures
"""
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_samples(rng):
    """6 x 3 well-spread sample matrix"""
    return rng.normal(size=(6, 3))


@pytest.fixture
def coupled_samples(rng):
    """x, y = x + small noise, and an independent third feature"""
    x = rng.normal(size=40)
    return np.column_stack([x, x + 0.1 * rng.normal(size=40), rng.normal(size=40)])

import numpy as np
import pytest

from covtestlab import data


@pytest.fixture
def small_dataset():
    """n=50, p=20 correlated design with the seven-signal vector."""
    return data.simulate(50, 20, sigma=0.5, rho=0.5, seed=7)


@pytest.fixture
def orthonormal_dataset():
    return data.simulate(100, 10, beta_star=np.zeros(10), sigma=1.0, seed=3, orthonormal=True)

import numpy as np
import pytest

from midas_specd.dgp import DgpSpec, simulate


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def null_sample():
    return simulate(DgpSpec(T=120, m=8, c=0.3, d=0.4, seed=11))


@pytest.fixture
def alt_sample():
    return simulate(DgpSpec(T=150, m=24, c=0.0, d=0.0, theta=1.0, seed=5))

import pytest

from tflocal import LatticeSpec, TorusGrid
from tflocal.verify import Environment


@pytest.fixture(scope="session")
def env():
    """Desk-scale environment: n=1, K=8, C=24, M=49."""
    return Environment(LatticeSpec(1, 8), TorusGrid(1, 49))


@pytest.fixture(scope="session")
def small_env():
    """Faster environment for brute-force oracles: n=1, K=2, C=6, M=13."""
    return Environment(LatticeSpec(1, 2), TorusGrid(1, 13))

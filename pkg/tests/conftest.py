import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pdpc import _backend

settings.register_profile(
    "pdpc", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pdpc")

# A(0,0) B(1,0) C(0,1) D(10,10) E(10,11), ids 1..5
CANON = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


@pytest.fixture
def canon():
    return CANON.copy()


def random_instance(rng, n=None, d=None, grid=False):
    """Random point set, optionally snapped to a coarse grid to force ties."""
    n = int(rng.integers(50, 501)) if n is None else n
    d = int(rng.choice([2, 3, 5])) if d is None else d
    X = rng.random((n, d))
    if grid:
        X = np.round(X * 6) / 6
    return X

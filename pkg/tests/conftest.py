import numpy as np
import pytest

from sphelast.kelvin import LameParams
from sphelast.oracle import build_quadrature


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def params():
    return LameParams(1.0, 1.0)


@pytest.fixture(scope="session")
def quad16():
    return build_quadrature(16)


@pytest.fixture(scope="session")
def quad20():
    return build_quadrature(20)


def random_units(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]

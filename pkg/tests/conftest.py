import numpy as np
import pytest

from distqec.designs import haar_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240731)


def random_unitary(dim, rng):
    return haar_unitary(dim, rng)


def random_pure_state(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    """Random mixed state: normalized Wishart with optional rank cap."""
    r = rank or dim
    a = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    m = a @ a.conj().T
    return m / m.trace()

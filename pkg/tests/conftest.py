import numpy as np
import pytest

from darkdimers import make_bath, make_geometry


@pytest.fixture(scope="session")
def bath088():
    """The reference minimal-uncertainty bath used throughout."""
    return make_bath(0.88, 0.0)


@pytest.fixture(scope="session")
def geo2_dark():
    """Two atoms at k0 z = (-pi/8, +pi/8): cos k0(z1+z2) = +1."""
    return make_geometry(2, np.pi / 4, 0.0)


def random_hermitian_unit_trace(rng, dim):
    """Random Hermitian matrix with exact unit trace (not necessarily
    positive; generator identities are linear)."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + a.conj().T
    h += (1.0 - np.trace(h).real) / dim * np.eye(dim)
    return h

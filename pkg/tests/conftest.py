import numpy as np
import pytest

from sqglab.besov import build_partition
from sqglab.sampling import random_mean_zero_field
from sqglab.spectral import FrequencyLattice


@pytest.fixture(scope="session")
def lattice32():
    return FrequencyLattice(m=32, h_xi=0.25)


@pytest.fixture(scope="session")
def partition32(lattice32):
    return build_partition(lattice32)


@pytest.fixture(scope="session")
def lattice128():
    return FrequencyLattice(m=128, h_xi=0.25)


@pytest.fixture(scope="session")
def partition128(lattice128):
    return build_partition(lattice128)


@pytest.fixture
def field_pair(lattice32):
    rng = np.random.default_rng(11)
    f = random_mean_zero_field(lattice32, rng, decay=1.0)
    g = random_mean_zero_field(lattice32, rng, decay=1.0)
    return f, g

import numpy as np
import pytest

from imkdv.multiplier import IMultiplierProfile
from imkdv.spectral import make_grid


@pytest.fixture
def grid32():
    return make_grid(2 * np.pi, 32)


@pytest.fixture
def grid64():
    return make_grid(2 * np.pi, 64)


@pytest.fixture
def profile():
    return IMultiplierProfile(N=2.0, s=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

import numpy as np
import pytest

from ccmrecon.array import ArrayConfig


@pytest.fixture
def cfg():
    return ArrayConfig()


@pytest.fixture
def small_cfg():
    return ArrayConfig(n_antennas=16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, m, psd=False):
    x = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return x @ x.conj().T if psd else x + x.conj().T


def on_grid_angle(m, q):
    """Angle whose half-wavelength phase step lands exactly on DFT bin ``q``."""
    q_signed = q if q <= m // 2 else q - m
    return float(np.arccos(-2.0 * q_signed / m))

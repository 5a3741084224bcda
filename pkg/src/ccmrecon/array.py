"""Uniform linear array geometry.

Angles are physical angles of arrival measured from the array axis, so the
response depends on ``cos(theta)`` and the array cannot tell ``theta`` from
``-theta``.  Interval logic elsewhere works in ``u = cos(theta)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike

from .numerics import ContractError

SPEED_OF_LIGHT = 299792458.0


class ArrayManifold(Protocol):
    """Anything that maps (carrier, angles) to unit-norm array responses."""

    n_antennas: int

    def steering_matrix(self, f: float, angles: ArrayLike) -> np.ndarray: ...


@dataclass(frozen=True)
class ArrayConfig:
    """ULA with ``n_antennas`` elements spaced ``spacing`` metres apart.

    ``spacing=None`` means half a wavelength at the uplink carrier.
    """

    n_antennas: int = 128
    f_up: float = 2.0e9
    f_down: float = 2.1e9
    spacing: float | None = None
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ContractError(f"antenna count must be >= 1, got {self.n_antennas}")
        if self.f_up <= 0 or self.f_down <= 0:
            raise ContractError("carrier frequencies must be positive")
        if self.spacing is None:
            object.__setattr__(self, "spacing", self.c / (2.0 * self.f_up))
        if self.spacing <= 0:
            raise ContractError("antenna spacing must be positive")

    @property
    def M(self) -> int:
        return self.n_antennas

    def chi(self, f: float) -> float:
        """Phase increment per element for a broadside-relative cosine of one."""
        return 2.0 * np.pi * f * self.spacing / self.c

    @property
    def chi_up(self) -> float:
        return self.chi(self.f_up)

    @property
    def chi_down(self) -> float:
        return self.chi(self.f_down)

    def steering_matrix(self, f: float, angles: ArrayLike) -> np.ndarray:
        """Columns are steering vectors at ``angles`` (radians), shape (M, L)."""
        u = np.cos(np.atleast_1d(np.asarray(angles, dtype=float)))
        m = np.arange(self.n_antennas)[:, None]
        return np.exp(-1j * self.chi(f) * m * u[None, :]) / np.sqrt(self.n_antennas)

    def bin_width(self, f: float | None = None) -> float:
        """Width of one DFT beamspace bin in cosine space."""
        f = self.f_up if f is None else f
        return 2.0 * np.pi / (self.n_antennas * self.chi(f))


def steering(cfg: ArrayConfig, f: float, theta: float) -> np.ndarray:
    """Unit-norm ULA response ``exp(-j m chi cos(theta)) / sqrt(M)``."""
    if not np.isfinite(theta):
        raise ContractError("steering angle must be finite")
    return cfg.steering_matrix(f, theta)[:, 0]


def rotation_diag(m: int, psi: float) -> np.ndarray:
    """Diagonal of the spatial rotation ``diag(1, e^{j psi}, ..., e^{j(M-1)psi})``."""
    return np.exp(1j * psi * np.arange(m))


def rotation_matrix(cfg: ArrayConfig, psi: float) -> np.ndarray:
    if abs(psi) > np.pi / cfg.n_antennas * (1 + 1e-12):
        warnings.warn(
            f"rotation {psi:.4g} rad lies outside the search range +-pi/M",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.diag(rotation_diag(cfg.n_antennas, psi))


def freq_shift_diag(cfg: ArrayConfig, theta: float | np.ndarray) -> np.ndarray:
    """Diagonal(s) mapping uplink to downlink steering vectors.

    For array-valued ``theta`` the result has shape (M, L), one column per angle.
    """
    theta = np.asarray(theta, dtype=float)
    m = np.arange(cfg.n_antennas)
    k = 2.0 * np.pi * cfg.spacing / cfg.c * (cfg.f_down - cfg.f_up)
    if theta.ndim == 0:
        return np.exp(-1j * k * m * np.cos(theta))
    return np.exp(-1j * k * m[:, None] * np.cos(theta)[None, :])


def freq_shift(cfg: ArrayConfig, theta: float) -> np.ndarray:
    if not np.isfinite(theta):
        raise ContractError("angle must be finite")
    return np.diag(freq_shift_diag(cfg, float(theta)))

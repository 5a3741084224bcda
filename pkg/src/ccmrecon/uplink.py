"""Uplink training: LS preamble, shared-pilot observation, SBEM truncation and CCM-aided MMSE.

Pilots are handled in post-matched-filter form: with ``s^H s = rho_u`` the
matched-filter output is the channel plus ``CN(0, I/rho_u)`` noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angles import beamspace
from .array import rotation_diag
from .channel import ChannelRealization
from .covariance import CcmEstimate
from .numerics import ContractError


@dataclass(frozen=True)
class TrainingConfig:
    """Training SNRs (linear), beamspace cardinality, retained eigenvectors and PAS grid size.

    ``grid_size=None`` selects the default ``min(M, max(8, 4*kappa))``.
    """

    rho_u: float = 10.0
    rho_d: float = 10.0
    kappa: int = 16
    nu: int = 16
    grid_size: int | None = None

    def __post_init__(self):
        if self.rho_u <= 0 or self.rho_d <= 0:
            raise ContractError("training SNRs must be positive")
        if self.kappa < 1 or self.nu < 1:
            raise ContractError("kappa and nu must be >= 1")
        if self.grid_size is not None and self.grid_size < 1:
            raise ContractError("PAS grid size must be >= 1")

    @classmethod
    def from_db(cls, snr_db: float, **kw) -> "TrainingConfig":
        rho = 10.0 ** (snr_db / 10.0)
        return cls(rho_u=rho, rho_d=rho, **kw)

    def check(self, m: int) -> None:
        if self.kappa > m or self.nu > m:
            raise ContractError(f"kappa and nu must not exceed M={m}")


def complex_noise(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def ls_preamble(h_true: ChannelRealization, rho_u: float, rng: np.random.Generator) -> ChannelRealization:
    """Orthogonal-pilot LS estimate ``h + n / sqrt(rho_u)``."""
    if rho_u <= 0:
        raise ContractError("rho_u must be positive")
    noise = complex_noise(rng, h_true.M) / np.sqrt(rho_u) if np.isfinite(rho_u) else 0.0
    return ChannelRealization(h_true.vector + noise, h_true.user, h_true.slot, h_true.link)


def group_observation(
    channels: Sequence[ChannelRealization], rho_u: float, rng: np.random.Generator
) -> np.ndarray:
    """Matched-filter output of a group sharing one pilot: sum of channels plus noise."""
    if len(channels) == 0:
        raise ContractError("group must contain at least one user")
    slots = {c.slot for c in channels}
    if len(slots) != 1:
        raise ContractError(f"group channels come from different slots {sorted(slots)}")
    total = np.sum([c.vector for c in channels], axis=0)
    if not np.isfinite(rho_u):
        return total
    return total + complex_noise(rng, total.size) / np.sqrt(rho_u)


def sbem_estimate(h_group, psi: float, bins) -> np.ndarray:
    """Rotate, keep the beamspace bins in ``bins``, zero the rest and rotate back."""
    h = np.asarray(getattr(h_group, "vector", h_group))
    bins = np.atleast_1d(np.asarray(bins, dtype=int))
    if bins.size == 0:
        raise ContractError("SBEM needs at least one beamspace bin")
    m = h.size
    b = beamspace(h, psi)
    kept = np.zeros_like(b)
    kept[bins] = b[bins]
    return rotation_diag(m, psi).conj() * (np.fft.ifft(kept) * np.sqrt(m))


def mmse_uplink(
    h_sbem,
    own: CcmEstimate,
    others: Sequence[CcmEstimate] = (),
    rho_u: float = 10.0,
    nu: int | None = None,
    asymptotic: bool = False,
) -> np.ndarray:
    """CCM-aided MMSE refinement of the SBEM estimate.

    Full form: ``R_k (I/rho_u + R_k + sum_i R_i)^-1 h`` with ``others`` the CCMs
    of the other users sharing the pilot.  Every CCM is replaced by its
    ``nu``-dominant eigen-approximation.  ``asymptotic=True`` uses the large-M
    single-user form ``V S (I/rho_u + S)^-1 V^H h``.
    """
    h = np.asarray(getattr(h_sbem, "vector", h_sbem))
    m = own.M
    if h.size != m or any(r.M != m for r in others):
        raise ContractError("dimension mismatch between channel and covariances")
    if rho_u <= 0:
        raise ContractError("rho_u must be positive")
    nu = m if nu is None else nu
    if asymptotic:
        v, lam = own.truncate(nu)
        lam = np.clip(lam, 0.0, None)
        return v @ (lam / (lam + 1.0 / rho_u) * (v.conj().T @ h))
    r_own = own.low_rank(nu)
    s = np.eye(m) / rho_u + r_own
    for r in others:
        s = s + r.low_rank(nu)
    return r_own @ np.linalg.solve(s, h)

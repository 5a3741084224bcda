"""Eigen-beamformed downlink training and MMSE recovery at the base station.

Feedback is ideal and the unitary training matrix is folded into the noise:
the BS sees ``(sum_i B_i)^H h_d`` plus ``CN(0, I/rho_d)`` noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angles import beamspace, signed_bins
from .array import ArrayConfig
from .covariance import CcmEstimate
from .numerics import ContractError
from .uplink import complex_noise


@dataclass(frozen=True)
class Beamformer:
    """M x nu training beams with orthonormal columns."""

    columns: np.ndarray
    user: int = 0

    @property
    def nu(self) -> int:
        return self.columns.shape[1]

    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T


def eigen_beamformer(r: CcmEstimate, nu: int, user: int = 0) -> Beamformer:
    """Train along the ``nu`` dominant eigenvectors of the downlink covariance."""
    v, _ = r.truncate(nu)
    return Beamformer(v, user)


def sbem_beamformer(h_ul, psi: float, cfg: ArrayConfig, nu: int, user: int = 0) -> Beamformer:
    """Downlink DFT beams picked from an uplink SBEM estimate.

    The downlink DFT grid is rotated so one beam points at the strongest uplink
    bin, then the ``nu`` beams whose directions collect the most uplink power
    are kept.
    """
    h = np.asarray(getattr(h_ul, "vector", h_ul))
    m = h.size
    if not 1 <= nu <= m:
        raise ContractError(f"nu must lie in [1, {m}], got {nu}")
    chi_u, chi_d = cfg.chi_up, cfg.chi_down
    b = np.abs(beamspace(h, psi)) ** 2
    q_peak = int(np.argmax(b))
    u_peak = (psi - 2.0 * np.pi * signed_bins(q_peak, m) / m) / chi_u
    xi_peak = chi_d * u_peak
    q_center = np.round(-xi_peak * m / (2.0 * np.pi))
    psi_d = xi_peak + 2.0 * np.pi * q_center / m

    xi = psi_d - 2.0 * np.pi * signed_bins(np.arange(m), m) / m
    u_beam = xi / chi_d
    # uplink matched-filter power in each downlink beam direction
    a_up = np.exp(-1j * chi_u * np.outer(np.arange(m), u_beam))
    power = np.abs(a_up.conj().T @ h) ** 2
    keep = np.sort(np.argsort(-power, kind="stable")[:nu])
    cols = np.exp(-1j * np.outer(np.arange(m), xi[keep])) / np.sqrt(m)
    return Beamformer(cols, user)


def _sum_beams(beamformers: Sequence[Beamformer]) -> np.ndarray:
    if len(beamformers) == 0:
        raise ContractError("need at least one beamformer")
    nus = {b.nu for b in beamformers}
    if len(nus) != 1:
        raise ContractError(f"group members must share nu, got {sorted(nus)}")
    return np.sum([b.columns for b in beamformers], axis=0)


def downlink_training(h_d, beamformers: Sequence[Beamformer], rho_d: float, rng: np.random.Generator) -> np.ndarray:
    """Fed-back observation ``(sum_i B_i)^H h_d + n``, ``n ~ CN(0, I/rho_d)``."""
    h = np.asarray(getattr(h_d, "vector", h_d))
    if rho_d <= 0:
        raise ContractError("rho_d must be positive")
    s = _sum_beams(beamformers)
    if s.shape[0] != h.size:
        raise ContractError("beamformer and channel dimensions differ")
    obs = s.conj().T @ h
    if np.isfinite(rho_d):
        obs = obs + complex_noise(rng, obs.size) / np.sqrt(rho_d)
    return obs


def mmse_downlink(
    obs: np.ndarray,
    r: CcmEstimate,
    beamformers: Sequence[Beamformer],
    rho_d: float,
    own: Beamformer | None = None,
    asymptotic: bool = False,
) -> np.ndarray:
    """``R B (B^H R B + I/rho_d)^-1 y`` with ``B`` the summed group beams.

    ``asymptotic=True`` keeps only the user's own beams (``own``, or the
    first beamformer when omitted).
    """
    obs = np.asarray(obs)
    if asymptotic:
        s = (own or beamformers[0]).columns
    else:
        s = _sum_beams(beamformers)
    if s.shape[0] != r.M or s.shape[1] != obs.size:
        raise ContractError("dimension mismatch in downlink MMSE")
    rs = r.matrix @ s
    g = s.conj().T @ rs + np.eye(s.shape[1]) / rho_d
    return rs @ np.linalg.solve(g, obs)


def ls_downlink(obs: np.ndarray, own: Beamformer) -> np.ndarray:
    """Covariance-free reconstruction from the user's own orthonormal beams."""
    return own.columns @ np.asarray(obs)

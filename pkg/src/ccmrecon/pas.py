"""Per-angle complex gain estimation inside an inferred AOA interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import AngleEstimate, infer_interval
from .array import ArrayConfig, rotation_diag
from .numerics import ContractError, pseudo_inverse


@dataclass(frozen=True)
class GainGrid:
    """Gains ``alpha_hat`` estimated at ``angles`` with the rotation ``psi``."""

    angles: np.ndarray
    gains: np.ndarray
    psi: float

    def __len__(self) -> int:
        return self.angles.size

    @property
    def powers(self) -> np.ndarray:
        return np.abs(self.gains) ** 2


def default_grid_size(m: int, kappa: int) -> int:
    return min(m, max(8, 4 * kappa))


def angle_grid(mean: float, spread: float, n: int) -> np.ndarray:
    """``n`` evenly spaced angles ``mean - spread + 2*spread*l/n``; one angle when spread is 0."""
    if spread < 0:
        raise ContractError(f"spread must be >= 0, got {spread}")
    if n < 1:
        raise ContractError(f"grid size must be >= 1, got {n}")
    if spread == 0:
        return np.array([mean], dtype=float)
    return mean - spread + 2.0 * spread * np.arange(n) / n


def rotated_grid(est: AngleEstimate, cfg: ArrayConfig, n: int, f: float | None = None) -> np.ndarray:
    """``angle_grid`` over the kept bins' interval read in the frame of ``Phi(psi) h``.

    The gain fits see the rotated channel, whose rays sit ``psi/chi`` away in
    cosine space from the true ones, so the grid is built with ``psi = 0``.
    The atoms ``Phi^H a(theta_l)`` of the reconstruction then land back on the
    true directions.
    """
    _, (lo, hi) = infer_interval(0.0, est.bins, cfg, f)
    return angle_grid(0.5 * (lo + hi), 0.5 * (hi - lo), n)


def _vector(h) -> np.ndarray:
    return np.asarray(getattr(h, "vector", h))


def gains_ls(h, psi: float, angles, cfg: ArrayConfig, f: float | None = None, tol: float = 1e-10) -> GainGrid:
    """Least-squares fit ``alpha = pinv(A(angles)) Phi(psi) h``; needs ``L <= M``."""
    h = _vector(h)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.size > h.size:
        raise ContractError(
            f"LS gain fit needs L <= M (got L={angles.size}, M={h.size}); use gains_dtft"
        )
    a = cfg.steering_matrix(cfg.f_up if f is None else f, angles)
    alpha = pseudo_inverse(a, tol) @ (rotation_diag(h.size, psi) * h)
    return GainGrid(angles, alpha, float(psi))


def gains_dtft(h, psi: float, angles, cfg: ArrayConfig, f: float | None = None) -> GainGrid:
    """Sample the spatial DTFT of ``Phi(psi) h`` at ``xi_l = -chi cos(theta_l)``.

    This is the matched filter ``a(theta_l)^H Phi h``, the Gram-free limit of
    ``gains_ls``, so both read angles in the same (rotated) frame.  The
    ``1/sqrt(M)`` factor makes an on-grid unit ray return exactly its gain.
    """
    h = _vector(h)
    m = h.size
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    chi = cfg.chi(cfg.f_up if f is None else f)
    xi = -chi * np.cos(angles)
    psi_mat = np.exp(-1j * np.outer(xi, np.arange(m)))
    alpha = psi_mat @ (rotation_diag(m, psi) * h) / np.sqrt(m)
    return GainGrid(angles, alpha, float(psi))


def estimate_gains(h, psi: float, angles, cfg: ArrayConfig, f: float | None = None) -> GainGrid:
    """LS when the grid fits in the array aperture, DTFT sampling otherwise."""
    h = _vector(h)
    if np.size(angles) <= h.size:
        return gains_ls(h, psi, angles, cfg, f)
    return gains_dtft(h, psi, angles, cfg, f)

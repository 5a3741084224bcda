"""Covariance reconstruction: IC-pCCM, CF-iCCM and MC-iCCM.

IC-pCCM rebuilds the covariance from per-angle gain magnitudes estimated out of
one instantaneous channel.  CF-iCCM evaluates the narrow-spread closed forms
for a known PAS family and MC-iCCM integrates the exact PAS numerically (by
deterministic trapezoid quadrature, despite the name).
"""

from __future__ import annotations

import numpy as np

from .array import ArrayConfig, rotation_diag
from .channel import DEFAULT_QUADRATURE, PasModel, link_for, quadrature_ccm
from .covariance import CcmEstimate
from .numerics import dft_matrix
from .pas import GainGrid

_SQRT2 = np.sqrt(2.0)
_EXP_SQRT2 = np.exp(-_SQRT2)


def _rank_one(cfg: ArrayConfig, f: float, theta: float, method: str) -> CcmEstimate:
    a = cfg.steering_matrix(f, theta)
    return CcmEstimate(a @ a.conj().T, link_for(cfg, f), method)


def ic_pccm(grid: GainGrid, cfg: ArrayConfig, f: float | None = None, psi: float | None = None) -> CcmEstimate:
    """``sum_l |alpha_l|^2 Phi^H a(theta_l) a(theta_l)^H Phi``.

    Only gain magnitudes enter, so the result ignores the channel phases.
    """
    f = cfg.f_up if f is None else f
    psi = grid.psi if psi is None else psi
    atoms = rotation_diag(cfg.n_antennas, psi).conj()[:, None] * cfg.steering_matrix(f, grid.angles)
    r = (atoms * grid.powers) @ atoms.conj().T
    return CcmEstimate(r, link_for(cfg, f), "IC-pCCM")


def _lag_phase(cfg: ArrayConfig, f: float) -> np.ndarray:
    m = np.arange(cfg.n_antennas)
    return (m[:, None] - m[None, :]) * cfg.chi(f)


def cf_iccm_uniform(mean: float, spread: float, cfg: ArrayConfig, f: float | None = None) -> CcmEstimate:
    """Narrow-spread closed form for a uniform PAS:
    ``R[m,n] = exp(-j x cos(mean)) sinc(x spread sin(mean)) / M`` with ``x = (m-n) chi``.
    """
    f = cfg.f_up if f is None else f
    if spread == 0:
        return _rank_one(cfg, f, mean, "CF-iCCM")
    x = _lag_phase(cfg, f)
    y = x * spread * np.sin(mean)
    r = np.exp(-1j * x * np.cos(mean)) * np.sinc(y / np.pi) / cfg.n_antennas
    return CcmEstimate(r, link_for(cfg, f), "CF-iCCM")


def cf_iccm_laplacian(mean: float, spread: float, cfg: ArrayConfig, f: float | None = None) -> CcmEstimate:
    """Narrow-spread closed form for a Laplacian PAS truncated to ``mean +- spread``."""
    f = cfg.f_up if f is None else f
    if spread == 0:
        return _rank_one(cfg, f, mean, "CF-iCCM")
    x = _lag_phase(cfg, f)
    y = x * spread * np.sin(mean)
    bracket = 2.0 * _SQRT2 * (1.0 - _EXP_SQRT2 * np.cos(y)) + 2.0 * _EXP_SQRT2 * y**2 * np.sinc(y / np.pi)
    r = np.exp(-1j * x * np.cos(mean)) * bracket / (2.0 + y**2) / (_SQRT2 * cfg.n_antennas)
    return CcmEstimate(r, link_for(cfg, f), "CF-iCCM")


def cf_iccm(kind: str, mean: float, spread: float, cfg: ArrayConfig, f: float | None = None) -> CcmEstimate:
    if kind == "uniform":
        return cf_iccm_uniform(mean, spread, cfg, f)
    if kind == "laplacian":
        return cf_iccm_laplacian(mean, spread, cfg, f)
    raise ValueError(f"no closed form for PAS kind {kind!r}")


def mc_iccm(model: PasModel, cfg: ArrayConfig, f: float | None = None, n_quad: int = DEFAULT_QUADRATURE) -> CcmEstimate:
    """Numerical integration of the exact PAS integral over the model support."""
    f = cfg.f_up if f is None else f
    return CcmEstimate(quadrature_ccm(cfg, f, model, n_quad), link_for(cfg, f), "MC-iCCM")


def infer_downlink(grid: GainGrid, cfg: ArrayConfig, mu: float = 1.0, psi: float | None = None) -> CcmEstimate:
    """Downlink covariance from uplink gains via the per-angle frequency shift.

    Grid angles live in the rotated frame, so the shift is evaluated at the
    de-rotated direction ``cos(theta_l) + psi/chi_u`` where the atom
    ``Phi^H a_u(theta_l)`` actually points.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    psi = grid.psi if psi is None else psi
    m = np.arange(cfg.n_antennas)
    u = np.cos(grid.angles) + psi / cfg.chi_up
    theta_shift = np.exp(-1j * (cfg.chi_down - cfg.chi_up) * np.outer(m, u))
    atoms = rotation_diag(cfg.n_antennas, psi).conj()[:, None] * cfg.steering_matrix(cfg.f_up, grid.angles)
    atoms = theta_shift * atoms
    r = mu * (atoms * grid.powers) @ atoms.conj().T
    return CcmEstimate(r, "downlink", "IC-pCCM")


def beamspace_spectrum(r: CcmEstimate) -> np.ndarray:
    """Diagnostic DFT-basis power ``f_l^H R f_l`` for every beam ``l``."""
    f = dft_matrix(r.M)
    return np.real(np.einsum("ml,mn,nl->l", f.conj(), r.matrix, f))


def truncate(r: CcmEstimate, nu: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-``nu`` eigenvectors and eigenvalues, largest first."""
    return r.truncate(nu)

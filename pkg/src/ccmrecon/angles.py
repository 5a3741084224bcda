"""Rotated-DFT angle acquisition.

The channel is rotated by ``Phi(psi)``, taken to DFT beamspace, and the
``kappa`` strongest bins are kept.  A bin ``q`` at rotation ``psi`` sees the
spatial frequency ``chi * cos(theta) = psi - 2*pi*q'/M`` where ``q'`` is the
signed alias of ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array import ArrayConfig
from .numerics import ContractError

DEFAULT_PSI_GRID = 64
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class AngleEstimate:
    """Rotation, kept beamspace bins and (optionally) the inferred AOA interval.

    ``u_interval`` is in cosine space, ``theta_interval`` in radians.  ``mean``
    and ``spread`` are the midpoint and half-width of ``theta_interval``.
    """

    psi: float
    bins: tuple[int, ...]
    captured: float
    u_interval: tuple[float, float] | None = None
    theta_interval: tuple[float, float] | None = None
    contiguous: bool = True

    @property
    def kappa(self) -> int:
        return len(self.bins)

    @property
    def mean(self) -> float:
        lo, hi = self._theta()
        return 0.5 * (lo + hi)

    @property
    def spread(self) -> float:
        lo, hi = self._theta()
        return 0.5 * (hi - lo)

    def _theta(self) -> tuple[float, float]:
        if self.theta_interval is None:
            raise ContractError("angle interval has not been inferred for this estimate")
        return self.theta_interval


def psi_grid(m: int, grid: int = DEFAULT_PSI_GRID) -> np.ndarray:
    """``grid`` equispaced rotations covering ``[-pi/M, pi/M)``; always contains 0."""
    if grid < 1:
        raise ContractError(f"rotation grid size must be >= 1, got {grid}")
    return 2.0 * np.pi * (np.arange(grid) - grid // 2) / (m * grid)


def beamspace(h: np.ndarray, psi: float | np.ndarray) -> np.ndarray:
    """``F Phi(psi) h`` for one rotation or a vector of rotations (one row each)."""
    h = np.asarray(h)
    m = h.size
    psi = np.asarray(psi, dtype=float)
    ramp = np.exp(1j * np.multiply.outer(psi, np.arange(m)))
    return np.fft.fft(ramp * h, axis=-1) / np.sqrt(m)


def _vector(h) -> np.ndarray:
    return np.asarray(getattr(h, "vector", h))


def _is_circular_run(bins: np.ndarray, m: int) -> bool:
    if bins.size <= 1 or bins.size == m:
        return True
    s = np.sort(bins)
    gaps = np.diff(np.concatenate([s, [s[0] + m]]))
    # exactly one gap larger than 1 means a single circular run
    return int(np.count_nonzero(gaps > 1)) == 1


def rotation_search(h, kappa: int, grid: int = DEFAULT_PSI_GRID) -> AngleEstimate:
    """Maximize the power captured by ``kappa`` beamspace bins over the rotation grid.

    Ties in rotation go to the smaller ``|psi|``; ties among bins to the lower index.
    """
    h = _vector(h)
    m = h.size
    if not 1 <= kappa <= m:
        raise ContractError(f"kappa must lie in [1, {m}], got {kappa}")
    total = float(np.vdot(h, h).real)
    if total == 0.0:
        raise ContractError("degenerate input: all-zero channel")

    psis = psi_grid(m, grid)
    power = np.abs(beamspace(h, psis)) ** 2
    objective = np.partition(power, m - kappa, axis=1)[:, m - kappa:].sum(axis=1)

    best = objective.max()
    ties = np.flatnonzero(objective >= best * (1 - _TIE_RTOL))
    g = ties[np.lexsort((psis[ties], np.abs(psis[ties])))[0]]

    order = np.argsort(-power[g], kind="stable")
    bins = np.sort(order[:kappa])
    return AngleEstimate(
        psi=float(psis[g]),
        bins=tuple(int(q) for q in bins),
        captured=float(min(objective[g] / total, 1.0)),
        contiguous=_is_circular_run(bins, m),
    )


def signed_bins(bins, m: int) -> np.ndarray:
    q = np.asarray(bins, dtype=int)
    return np.where(q <= m // 2, q, q - m)


def infer_interval(
    psi: float, bins, cfg: ArrayConfig, f: float | None = None
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Cosine-space and angle-space AOA interval covered by the kept bins.

    Each bin is a cell of width ``2*pi/(M*chi)`` in cosine space, so half a
    bin is added on both sides before clamping to the visible region.
    """
    bins = np.atleast_1d(np.asarray(bins, dtype=int))
    if bins.size == 0:
        raise ContractError("index set must be non-empty")
    m = cfg.n_antennas
    chi = cfg.chi(cfg.f_up if f is None else f)
    u = (psi - 2.0 * np.pi * signed_bins(bins, m) / m) / chi
    half = np.pi / (m * chi)
    lo, hi = u.min() - half, u.max() + half
    if lo > 1.0 or hi < -1.0:
        raise ContractError("angles outside visible region")
    lo, hi = max(lo, -1.0), min(hi, 1.0)
    return (float(lo), float(hi)), (float(np.arccos(hi)), float(np.arccos(lo)))


def estimate_angles(
    h, cfg: ArrayConfig, kappa: int, grid: int = DEFAULT_PSI_GRID, f: float | None = None
) -> AngleEstimate:
    """Rotation search followed by interval inference."""
    est = rotation_search(h, kappa, grid)
    u_iv, th_iv = infer_interval(est.psi, est.bins, cfg, f)
    return AngleEstimate(est.psi, est.bins, est.captured, u_iv, th_iv, est.contiguous)


def angular_distance(e1: AngleEstimate, e2: AngleEstimate) -> float:
    """Gap between two cosine-space intervals, zero when they touch or overlap."""
    if e1.u_interval is None or e2.u_interval is None:
        raise ContractError("both estimates need an inferred interval")
    return interval_gap(e1.u_interval, e2.u_interval)


def interval_gap(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, max(a[0], b[0]) - min(a[1], b[1]))

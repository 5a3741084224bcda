"""Ground-truth channel synthesis from a power angular spectrum (PAS).

A multipath component is a continuum of rays over ``[mean - spread, mean + spread]``.
We discretize it into equispaced rays with trapezoid weights; only the ray
phases are random, so the average of ``h h^H`` over phase redraws equals the
quadrature covariance exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array import ArrayConfig
from .covariance import CcmEstimate
from .numerics import ContractError

PAS_KINDS = ("uniform", "laplacian", "tabulated")
DEFAULT_RAYS = 256
DEFAULT_QUADRATURE = 2048

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PasModel:
    """PAS of one multipath component.

    ``mean`` and ``spread`` are in radians; the support is
    ``[mean - spread, mean + spread]``.  For ``kind="tabulated"`` the density
    is linearly interpolated from ``table_angles``/``table_density`` and is
    zero outside the table.
    """

    kind: str
    mean: float
    spread: float
    table_angles: tuple = field(default=(), compare=False)
    table_density: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in PAS_KINDS:
            raise ContractError(f"unknown PAS kind {self.kind!r}")
        if not (np.isfinite(self.mean) and np.isfinite(self.spread)):
            raise ContractError("PAS mean and spread must be finite")
        if self.spread < 0:
            raise ContractError(f"angular spread must be >= 0, got {self.spread}")
        lo, hi = self.support
        if lo < -1e-12 or hi > np.pi + 1e-12:
            raise ContractError(
                f"PAS support [{lo:.4f}, {hi:.4f}] rad leaves [0, pi]; a ULA cannot resolve it"
            )
        if self.kind == "tabulated":
            a = np.asarray(self.table_angles, dtype=float)
            s = np.asarray(self.table_density, dtype=float)
            if a.size < 2 or a.shape != s.shape:
                raise ContractError("tabulated PAS needs matching angle/density tables")
            if np.any(s < 0) or np.any(np.diff(a) <= 0):
                raise ContractError("tabulated PAS needs increasing angles and densities >= 0")

    @property
    def support(self) -> tuple[float, float]:
        return self.mean - self.spread, self.mean + self.spread

    def check_open_support(self) -> None:
        """Reject supports that touch the ULA ambiguity boundary at 0 or pi."""
        lo, hi = self.support
        if lo <= 0 or hi >= np.pi:
            raise ContractError(
                f"PAS support [{np.degrees(lo):.2f}, {np.degrees(hi):.2f}] deg must lie inside (0, 180)"
            )

    def density(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        lo, hi = self.support
        inside = (theta >= lo - 1e-12) & (theta <= hi + 1e-12)
        if self.kind == "uniform":
            s = np.full(theta.shape, 1.0 / (2.0 * self.spread)) if self.spread > 0 else np.zeros(theta.shape)
        elif self.kind == "laplacian":
            if self.spread > 0:
                s = np.exp(-_SQRT2 * np.abs(theta - self.mean) / self.spread) / (_SQRT2 * self.spread)
            else:
                s = np.zeros(theta.shape)
        else:
            s = np.interp(theta, self.table_angles, self.table_density, left=0.0, right=0.0)
        return np.where(inside, s, 0.0)

    def quadrature(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Equispaced nodes over the support and weights ``S(theta) * trapezoid_weight``."""
        if n < 2:
            raise ContractError(f"quadrature needs at least 2 nodes, got {n}")
        lo, hi = self.support
        nodes = np.linspace(lo, hi, n)
        w = np.full(n, (hi - lo) / (n - 1))
        w[[0, -1]] *= 0.5
        return nodes, self.density(nodes) * w


@dataclass(frozen=True)
class RaySet:
    angles: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray

    def __len__(self) -> int:
        return self.angles.size

    @property
    def gains(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)


@dataclass(frozen=True)
class ChannelRealization:
    """One user's channel vector in one coherence slot."""

    vector: np.ndarray
    user: int = 0
    slot: int = 0
    link: str = "uplink"

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.ndim != 1:
            raise ContractError("channel vector must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ContractError("channel vector has non-finite entries")
        object.__setattr__(self, "vector", v)

    @property
    def M(self) -> int:
        return self.vector.size

    def power(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)


def _uniform_phases(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, n)


def build_rays(model: PasModel, n_rays: int = DEFAULT_RAYS, rng: np.random.Generator | None = None) -> RaySet:
    """Discretize a PAS into ``n_rays`` equispaced rays with random phases."""
    if n_rays < 1:
        raise ContractError(f"ray count must be >= 1, got {n_rays}")
    rng = np.random.default_rng() if rng is None else rng
    if model.spread == 0:
        return RaySet(np.array([model.mean]), np.array([1.0]), _uniform_phases(rng, 1))
    if n_rays == 1:
        nodes, w = model.quadrature(DEFAULT_QUADRATURE)
        return RaySet(np.array([model.mean]), np.array([np.sqrt(w.sum())]), _uniform_phases(rng, 1))
    angles, w = model.quadrature(n_rays)
    return RaySet(angles, np.sqrt(w), _uniform_phases(rng, n_rays))


def redraw_phases(rays: RaySet, rng: np.random.Generator) -> RaySet:
    """Same geometry, fresh i.i.d. phases: the next coherence slot."""
    return RaySet(rays.angles, rays.amplitudes, _uniform_phases(rng, len(rays)))


def synthesize(
    cfg: ArrayConfig,
    f: float,
    rays: RaySet,
    user: int = 0,
    slot: int = 0,
    link: str | None = None,
    scale: float = 1.0,
) -> ChannelRealization:
    """Sum of ray gains times steering vectors at carrier ``f``."""
    if link is None:
        link = link_for(cfg, f)
    h = cfg.steering_matrix(f, rays.angles) @ (scale * rays.gains)
    return ChannelRealization(h, user=user, slot=slot, link=link)


def link_for(cfg: ArrayConfig, f: float) -> str:
    return "downlink" if f == cfg.f_down and f != cfg.f_up else "uplink"


def quadrature_ccm(cfg: ArrayConfig, f: float, model: PasModel, n_quad: int) -> np.ndarray:
    if model.spread == 0:
        a = cfg.steering_matrix(f, model.mean)
        return a @ a.conj().T
    nodes, w = model.quadrature(n_quad)
    # ULA covariance is Hermitian Toeplitz: only the first column needs the integral
    m = cfg.n_antennas
    z = np.exp(-1j * cfg.chi(f) * np.cos(nodes))
    powers = np.empty((m, z.size), dtype=complex)
    powers[0] = 1.0
    # running products are far cheaper than M*N complex exponentials
    np.cumprod(np.broadcast_to(z, (m - 1, z.size)), axis=0, out=powers[1:])
    return hermitian_toeplitz(powers @ w / m)


def hermitian_toeplitz(col: np.ndarray) -> np.ndarray:
    """Matrix with ``R[m, n] = col[m - n]`` for ``m >= n`` and its conjugate above."""
    m = col.size
    k = np.arange(m)[:, None] - np.arange(m)[None, :]
    return np.where(k >= 0, col[np.abs(k)], col[np.abs(k)].conj())


def true_ccm(
    cfg: ArrayConfig,
    f: float,
    model: PasModel,
    n_quad: int = DEFAULT_QUADRATURE,
    link: str | None = None,
) -> CcmEstimate:
    """Quadrature of ``integral S(theta) a(theta) a(theta)^H dtheta`` over the support.

    A zero spread returns the exact specular outer product.
    """
    r = quadrature_ccm(cfg, f, model, n_quad)
    return CcmEstimate(r, link or link_for(cfg, f), "TrueQuadrature")


def sample_ccm(channels: np.ndarray, link: str = "uplink") -> CcmEstimate:
    """Sample average of ``h h^H`` over the rows of ``channels`` (shape N x M)."""
    h = np.asarray(channels)
    r = h.T @ h.conj() / h.shape[0]
    return CcmEstimate(0.5 * (r + r.conj().T), link, "SampleAverage")

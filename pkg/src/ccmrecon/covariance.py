"""Container for channel covariance matrices (CCMs)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .numerics import (
    DEFAULT_RANK_TOL,
    ContractError,
    EigenDecomposition,
    hermitian_eig,
    numerical_rank,
    power_rank,
)

LINKS = ("uplink", "downlink")
METHOD_TAGS = ("IC-pCCM", "CF-iCCM", "MC-iCCM", "TrueQuadrature", "SampleAverage")

HERMITIAN_REL_TOL = 1e-10
PSD_REL_TOL = 1e-10


@dataclass(frozen=True)
class CcmEstimate:
    """An M x M Hermitian PSD covariance with a lazily computed eigendecomposition."""

    matrix: np.ndarray
    link: str = "uplink"
    method: str = "TrueQuadrature"
    rank_tol: float = DEFAULT_RANK_TOL
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = np.asarray(self.matrix, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ContractError(f"CCM must be square, got shape {r.shape}")
        if self.link not in LINKS:
            raise ContractError(f"unknown link {self.link!r}")
        if self.method not in METHOD_TAGS:
            raise ContractError(f"unknown method tag {self.method!r}")
        scale = np.linalg.norm(r)
        if scale > 0 and np.linalg.norm(r - r.conj().T) > HERMITIAN_REL_TOL * scale:
            raise ContractError("CCM is not Hermitian")
        r.setflags(write=False)
        object.__setattr__(self, "matrix", r)

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        return hermitian_eig(self.matrix)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def numerical_rank(self) -> int:
        return numerical_rank(self.eig.eigenvalues, self.rank_tol)

    def power_rank(self, fraction: float = 0.99) -> int:
        return power_rank(self.eig.eigenvalues, fraction)

    def is_psd(self, rel_tol: float = PSD_REL_TOL) -> bool:
        lam = self.eig.eigenvalues
        top = max(lam[0], 0.0) if lam.size else 0.0
        return bool(lam[-1] >= -rel_tol * top)

    def truncate(self, nu: int) -> tuple[np.ndarray, np.ndarray]:
        """Top-``nu`` eigenvectors (M x nu) and eigenvalues, largest first."""
        if not 1 <= nu <= self.M:
            raise ContractError(f"nu must lie in [1, {self.M}], got {nu}")
        top = self.eig.top(nu)
        return top.eigenvectors, top.eigenvalues

    def low_rank(self, nu: int) -> np.ndarray:
        """The matrix rebuilt from its ``nu`` dominant eigenpairs."""
        v, lam = self.truncate(nu)
        return (v * np.clip(lam, 0.0, None)) @ v.conj().T

    def scaled(self, mu: float) -> "CcmEstimate":
        return CcmEstimate(mu * self.matrix, self.link, self.method, self.rank_tol, dict(self.meta))

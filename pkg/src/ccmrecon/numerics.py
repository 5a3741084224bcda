"""Small linear-algebra layer shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ContractError(ValueError):
    """An input violated the documented preconditions of an operation."""


HERMITIAN_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-6


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a Hermitian matrix, largest eigenvalue first."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def top(self, nu: int) -> "EigenDecomposition":
        return EigenDecomposition(self.eigenvalues[:nu], self.eigenvectors[:, :nu])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = np.linalg.norm(h)
    if scale == 0:
        return True
    return np.linalg.norm(h - h.conj().T) <= tol * scale


def hermitian_eig(h: np.ndarray, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.

    For repeated eigenvalues any orthonormal basis of the eigenspace may be
    returned, so callers should only rely on spanned subspaces.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError(f"hermitian_eig needs a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ContractError("hermitian_eig got non-finite entries")
    if not is_hermitian(h, tol):
        raise ContractError("hermitian_eig got a non-Hermitian matrix")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return EigenDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def pseudo_inverse(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Moore-Penrose pseudo-inverse; singular values below ``tol * s_max`` are dropped."""
    a = np.asarray(a)
    if not 0 < tol < 1:
        raise ContractError(f"tol must lie in (0, 1), got {tol}")
    if not np.all(np.isfinite(a)):
        raise ContractError("pseudo_inverse got non-finite entries")
    return np.linalg.pinv(a, rcond=tol)


def dft_matrix(m: int) -> np.ndarray:
    """Normalized M-point DFT matrix, ``F[p, q] = exp(-2j*pi*p*q/M) / sqrt(M)``."""
    if m < 1:
        raise ContractError(f"DFT size must be >= 1, got {m}")
    idx = np.arange(m)
    # reduce p*q mod M before scaling so large M keeps full phase accuracy
    return np.exp(-2j * np.pi * (np.outer(idx, idx) % m) / m) / np.sqrt(m)


def numerical_rank(eigenvalues: np.ndarray, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count eigenvalues above ``rel_tol * max(eigenvalues)``."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        return 0
    top = lam.max()
    if top <= 0:
        return 0
    return int(np.count_nonzero(lam > rel_tol * top))


def power_rank(eigenvalues: np.ndarray, fraction: float = 0.99) -> int:
    """Smallest number of leading eigenvalues whose sum reaches ``fraction`` of the trace."""
    lam = np.clip(np.sort(np.asarray(eigenvalues, dtype=float))[::-1], 0.0, None)
    total = lam.sum()
    if total <= 0:
        return 0
    cum = np.cumsum(lam)
    return int(np.searchsorted(cum, fraction * total * (1 - 1e-12)) + 1)

"""Subspace efficiency and normalized squared error."""

from __future__ import annotations

import numpy as np

from ..covariance import CcmEstimate
from ..numerics import ContractError


def efficiency(r_true: CcmEstimate, b_hat: np.ndarray) -> float:
    """Fraction of ``tr(R)`` captured by the orthonormal columns of ``b_hat``."""
    b = np.asarray(b_hat)
    if b.ndim == 1:
        b = b[:, None]
    gram = b.conj().T @ b
    if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-8, rtol=0):
        raise ContractError("efficiency needs a matrix with orthonormal columns")
    total = r_true.trace
    if total <= 0:
        raise ContractError("true covariance has zero trace")
    captured = float(np.real(np.trace(b.conj().T @ r_true.matrix @ b)))
    return float(np.clip(captured / total, 0.0, 1.0))


def nmse(h, h_hat) -> float:
    """``||h - h_hat||^2 / ||h||^2`` for one user and slot."""
    h = np.asarray(getattr(h, "vector", h))
    h_hat = np.asarray(getattr(h_hat, "vector", h_hat))
    p = float(np.vdot(h, h).real)
    if p == 0:
        raise ContractError("nmse is undefined for a zero channel")
    e = h - h_hat
    return float(np.vdot(e, e).real) / p


def db(x: float) -> float:
    return 10.0 * np.log10(x)

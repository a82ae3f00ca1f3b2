"""Nyström completion of a Gram matrix from the anchor blocks of a distance matrix."""

from __future__ import annotations

import logging
import warnings

import numpy as np

from .geometry import GramMatrix, PointConfig, mds_embed, sorted_eigh

__all__ = [
    "center_blocks",
    "nystrom_complete",
    "psd_pinv",
    "localize_full",
    "RankDeficiencyWarning",
]

log = logging.getLogger(__name__)


class RankDeficiencyWarning(UserWarning):
    """The anchor Gram block has lower rank than the requested embedding."""


def center_blocks(E, F) -> tuple[np.ndarray, np.ndarray]:
    """Gram blocks ``A`` (m x m) and ``B`` (m x n) under anchor-centroid centering.

    Only the anchor-anchor block ``E`` and anchor-mobile block ``F`` are used.
    """
    E = np.asarray(E, dtype=float)
    F = np.asarray(F, dtype=float)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ValueError(f"E must be square, got {E.shape}")
    m = E.shape[0]
    if m < 1:
        raise ValueError("need at least one anchor")
    if F.ndim != 2 or F.shape[0] != m:
        raise ValueError(f"F must have {m} rows, got {F.shape}")
    e_row = E.mean(axis=1)
    e_all = e_row.mean()
    A = -0.5 * (E - E.mean(axis=0)[None, :] - e_row[:, None] + e_all)
    B = -0.5 * (F - F.mean(axis=0)[None, :] - e_row[:, None] + e_all)
    return 0.5 * (A + A.T), B


def psd_pinv(A, rank_tol: float = 1e-10) -> tuple[np.ndarray, int]:
    """Pseudo-inverse of a symmetric PSD matrix and its numerical rank.

    Eigenvalues below ``rank_tol * lambda_max`` are treated as zero; any
    eigenvalue below ``-rank_tol * lambda_max`` raises ``ValueError``.
    """
    vals, vecs = sorted_eigh(np.asarray(A, dtype=float))
    lam_max = max(vals[0], 0.0) if vals.size else 0.0
    cutoff = rank_tol * lam_max
    if vals.size and vals[-1] < -cutoff:
        raise ValueError(
            f"anchor Gram block is not PSD: eigenvalue {vals[-1]:.3e} "
            f"below -{cutoff:.3e}"
        )
    keep = vals > cutoff
    if lam_max == 0.0:
        keep[:] = False
    V = vecs[:, keep]
    return (V / vals[keep]) @ V.T, int(keep.sum())


def nystrom_complete(A, B, rank_tol: float = 1e-10) -> GramMatrix:
    """Assemble ``[[A, B], [B^T, B^T A^+ B]]``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m = A.shape[0]
    Ainv, _ = psd_pinv(A, rank_tol)
    C = B.T @ Ainv @ B
    K = np.block([[A, B], [B.T, 0.5 * (C + C.T)]])
    return GramMatrix(K, m)


def localize_full(E, F, r: int, rank_tol: float = 1e-10) -> PointConfig:
    """Embed anchors and mobiles from fully observed ``E`` and ``F``."""
    A, B = center_blocks(E, F)
    _, rank = psd_pinv(A, rank_tol)
    if rank < r:
        msg = f"rank(A)={rank} < r={r}: anchors do not span the embedding dimension"
        log.warning(msg)
        warnings.warn(msg, RankDeficiencyWarning, stacklevel=2)
    return mds_embed(nystrom_complete(A, B, rank_tol), r)

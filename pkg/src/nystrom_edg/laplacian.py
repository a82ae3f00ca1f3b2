"""Complete-graph Laplacian link between columns of F and columns of B."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ReducedColumn",
    "complete_graph_laplacian",
    "reduced_column",
    "b_column",
    "anchor_row_sums",
    "entry_difference_observation",
]


@dataclass(frozen=True, eq=False)
class ReducedColumn:
    values: np.ndarray
    source_column: int


def complete_graph_laplacian(m: int) -> np.ndarray:
    """``m I - 1 1^T``: degree ``m-1`` on the diagonal, ``-1`` elsewhere."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return m * np.eye(m) - np.ones((m, m))


def reduced_column(F_col, E, j: int) -> ReducedColumn:
    F_col = np.asarray(F_col, dtype=float)
    E = np.asarray(E, dtype=float)
    m = E.shape[0]
    if F_col.shape != (m,):
        raise ValueError(f"F column has shape {F_col.shape}, expected ({m},)")
    vals = -(F_col - E.mean(axis=1)) / (2 * m)
    vals.setflags(write=False)
    return ReducedColumn(vals, int(j))


def b_column(f: ReducedColumn, L: np.ndarray) -> np.ndarray:
    return L @ f.values


def anchor_row_sums(E) -> np.ndarray:
    """Row sums of ``E``; precomputed once by the batch observation path."""
    return np.asarray(E, dtype=float).sum(axis=1)


def entry_difference_observation(F_ij: float, F_kj: float, E, i: int, k: int) -> float:
    """``B[i,j] - B[k,j]`` from two entries of one F column and the E block."""
    E = np.asarray(E, dtype=float)
    m = E.shape[0]
    if not (0 <= i < m and 0 <= k < m):
        raise IndexError(f"anchor indices ({i}, {k}) out of range for m={m}")
    if i == k:
        return 0.0
    g = (E[i].sum() - E[k].sum()) / (2 * m)
    return -0.5 * (F_ij - F_kj) + g

"""Non-orthogonal measurement bases and their closed-form duals.

Two families are provided:

* the column family on ``m x n`` matrices with zero column sums, whose
  primal elements measure ``B[i, j] - B[m-1, j]``;
* the ``s``-centered family on symmetric ``p x p`` matrices with ``X s = 0``,
  whose primal elements measure squared distances ``D[i, j]``.

Elements are kept in structured form (indices plus the centering weights)
and materialized densely only on request. ``dual_via_H_oracle`` synthesizes
duals from the inverse of the primal Gram matrix and serves as an
independent check on the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .geometry import CenteringVector, GramMatrix

__all__ = [
    "ColumnBasisElement",
    "SBasisElement",
    "ColumnFamily",
    "SFamily",
    "BasisGram",
    "column_basis",
    "column_dual",
    "s_basis",
    "s_dual",
    "column_gram_closed_form",
    "basis_gram_H",
    "dual_via_H_oracle",
    "expand_gram",
    "nystrom_dual_blocks",
    "block_restricted_expansion",
]

PRIMAL = "primal"
DUAL = "dual"
MAX_ORACLE_SIZE = 5000


def _check_kind(kind: str) -> str:
    if kind not in (PRIMAL, DUAL):
        raise ValueError(f"kind must be 'primal' or 'dual', got {kind!r}")
    return kind


# -- column family ---------------------------------------------------------


@dataclass(frozen=True)
class ColumnBasisElement:
    """Element ``(i, j)`` of the zero-column-sum family, ``0 <= i < m-1``."""

    i: int
    j: int
    m: int
    n: int
    kind: str = PRIMAL

    def __post_init__(self):
        _check_kind(self.kind)
        if self.m < 2:
            raise ValueError("column family needs m >= 2")
        if not 0 <= self.i < self.m - 1:
            raise IndexError(f"row index {self.i} outside [0, {self.m - 1})")
        if not 0 <= self.j < self.n:
            raise IndexError(f"column index {self.j} outside [0, {self.n})")

    def dense(self) -> np.ndarray:
        M = np.zeros((self.m, self.n))
        if self.kind == PRIMAL:
            M[self.i, self.j] = 1.0
            M[self.m - 1, self.j] = -1.0
        else:
            M[:, self.j] = -1.0 / self.m
            M[self.i, self.j] += 1.0
        return M

    def inner(self, B) -> float:
        """Trace inner product with an ``m x n`` matrix."""
        col = np.asarray(B, dtype=float)[:, self.j]
        if self.kind == PRIMAL:
            return float(col[self.i] - col[self.m - 1])
        return float(col[self.i] - col.mean())


def column_basis(i: int, j: int, m: int, n: int) -> np.ndarray:
    return ColumnBasisElement(i, j, m, n, PRIMAL).dense()


def column_dual(i: int, j: int, m: int, n: int) -> np.ndarray:
    return ColumnBasisElement(i, j, m, n, DUAL).dense()


@dataclass(frozen=True)
class ColumnFamily:
    """All ``(m-1) n`` column elements, ordered column by column."""

    m: int
    n: int

    @property
    def size(self) -> int:
        return (self.m - 1) * self.n

    def index(self, i: int, j: int) -> int:
        return j * (self.m - 1) + i

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(self.n) for i in range(self.m - 1)]

    def element(self, alpha: int, kind: str = PRIMAL) -> ColumnBasisElement:
        j, i = divmod(alpha, self.m - 1)
        return ColumnBasisElement(i, j, self.m, self.n, kind)

    def dense(self, alpha: int, kind: str = PRIMAL) -> np.ndarray:
        return self.element(alpha, kind).dense()


def column_gram_closed_form(m: int, n: int) -> np.ndarray:
    """2 on the diagonal, 1 within a column, 0 across columns."""
    block = np.ones((m - 1, m - 1)) + np.eye(m - 1)
    return np.kron(np.eye(n), block)


# -- s-centered family -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SBasisElement:
    """Element ``(i, j)``, ``i < j``, of the family centered by ``s``.

    Primal: ``a a^T`` with ``a = e_i - e_j - ((s_i - s_j)/|s|^2) s``.
    Dual: ``-(c d^T + d c^T)/2`` with ``c = e_i - s_i 1`` and ``d = e_j - s_j 1``.
    """

    i: int
    j: int
    s: CenteringVector
    kind: str = PRIMAL

    def __post_init__(self):
        _check_kind(self.kind)
        if not isinstance(self.s, CenteringVector):
            object.__setattr__(self, "s", CenteringVector(self.s))
        p = self.s.p
        if not 0 <= self.i < self.j < p:
            raise IndexError(f"need 0 <= i < j < {p}, got ({self.i}, {self.j})")

    @property
    def kappa(self) -> float:
        w = self.s.weights
        return float((w[self.i] - w[self.j]) / self.s.norm_sq)

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """The two factor vectors: ``(a, a)`` for primal, ``(c, d)`` for dual."""
        w = self.s.weights
        p = w.size
        if self.kind == PRIMAL:
            a = -self.kappa * w
            a[self.i] += 1.0
            a[self.j] -= 1.0
            return a, a
        c = np.full(p, -w[self.i])
        c[self.i] += 1.0
        d = np.full(p, -w[self.j])
        d[self.j] += 1.0
        return c, d

    def dense(self) -> np.ndarray:
        u, v = self.vectors()
        if self.kind == PRIMAL:
            return np.outer(u, u)
        return -0.5 * (np.outer(u, v) + np.outer(v, u))

    def inner(self, X) -> float:
        """Trace inner product with a symmetric ``p x p`` matrix."""
        X = np.asarray(X, dtype=float)
        u, v = self.vectors()
        val = float(u @ X @ v)
        return val if self.kind == PRIMAL else -val


def s_basis(i: int, j: int, s) -> np.ndarray:
    return SBasisElement(i, j, s, PRIMAL).dense()


def s_dual(i: int, j: int, s) -> np.ndarray:
    return SBasisElement(i, j, s, DUAL).dense()


@dataclass(frozen=True, eq=False)
class SFamily:
    """All ``p(p-1)/2`` pairs ``i < j`` in lexicographic order."""

    s: CenteringVector

    def __post_init__(self):
        if not isinstance(self.s, CenteringVector):
            object.__setattr__(self, "s", CenteringVector(self.s))

    @property
    def p(self) -> int:
        return self.s.p

    @property
    def size(self) -> int:
        return self.p * (self.p - 1) // 2

    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(self.p), 2))

    def index(self, i: int, j: int) -> int:
        p = self.p
        return i * p - i * (i + 1) // 2 + (j - i - 1)

    def element(self, alpha: int, kind: str = PRIMAL) -> SBasisElement:
        i, j = self.pairs()[alpha]
        return SBasisElement(i, j, self.s, kind)

    def dense(self, alpha: int, kind: str = PRIMAL) -> np.ndarray:
        return self.element(alpha, kind).dense()


# -- Gram matrix of the primal elements and the H^-1 oracle -----------------


@dataclass(frozen=True, eq=False)
class BasisGram:
    H: np.ndarray
    family: object


def _stacked(family, kind: str = PRIMAL) -> np.ndarray:
    """``L x q`` matrix whose rows are vectorized elements."""
    return np.stack([family.dense(a, kind).ravel() for a in range(family.size)])


def basis_gram_H(family) -> BasisGram:
    """Pairwise inner products of the primal elements, by brute force."""
    W = _stacked(family)
    H = W @ W.T
    return BasisGram(0.5 * (H + H.T), family)


def dual_via_H_oracle(family, alpha: int | None = None) -> np.ndarray:
    """Dual element(s) ``v_alpha = sum_beta (H^-1)[alpha, beta] w_beta``.

    With ``alpha=None`` all duals are returned, stacked along axis 0.
    """
    L = family.size
    if L > MAX_ORACLE_SIZE:
        raise ValueError(f"family size {L} exceeds the dense oracle limit")
    W = _stacked(family)
    H = W @ W.T
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(f"H is numerically singular (cond={cond:.3e})")
    shape = family.dense(0).shape
    if alpha is None:
        V = np.linalg.solve(H, W)
        return V.reshape((L,) + shape)
    e = np.zeros(L)
    e[alpha] = 1.0
    coef = np.linalg.solve(H, e)
    return (coef @ W).reshape(shape)


# -- expansions --------------------------------------------------------------


def expand_gram(coefficients: Mapping[tuple[int, int], float], s, m: int = 1) -> GramMatrix:
    """Sum ``D_ij * v_ij`` over all pairs ``i < j``.

    ``coefficients`` must provide every pair; the result is the Gram matrix
    centered by ``s``.
    """
    family = SFamily(s)
    p = family.p
    K = np.zeros((p, p))
    for i, j in family.pairs():
        try:
            d = coefficients[(i, j)]
        except KeyError:
            raise KeyError(f"missing coefficient for pair ({i}, {j})") from None
        if d:
            c, e = SBasisElement(i, j, family.s, DUAL).vectors()
            K -= 0.5 * d * (np.outer(c, e) + np.outer(e, c))
    return GramMatrix(K, m)


def nystrom_dual_blocks(i: int, j: int, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(1,1)`` and ``(1,2)`` blocks of the dual element ``(i, j)`` under
    anchor-centroid centering, using the three-case piecewise form."""
    p = m + n
    if not 0 <= i < j < p:
        raise IndexError(f"need 0 <= i < j < {p}, got ({i}, {j})")
    ones = np.ones(m)
    v11 = np.zeros((m, m))
    v12 = np.zeros((m, n))
    if j < m:
        ci = -ones / m
        ci[i] += 1.0
        cj = -ones / m
        cj[j] += 1.0
        v11 = -0.5 * (np.outer(ci, cj) + np.outer(cj, ci))
        # mobile entries of both factors equal -1/m
        v12 = -0.5 * np.outer(ci + cj, np.full(n, -1.0 / m))
    elif i < m:
        ci = -ones / m
        ci[i] += 1.0
        v12[:, j - m] = -0.5 * ci
    return v11, v12


def block_restricted_expansion(E, F, s=None) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild ``A`` and ``B`` from ``E`` and ``F`` by summing restricted duals.

    Only the anchor-centroid centering is supported; pairs with both indices
    among the mobiles contribute nothing and are skipped.
    """
    E = np.asarray(E, dtype=float)
    F = np.asarray(F, dtype=float)
    m, n = F.shape
    if s is not None:
        w = s.weights if isinstance(s, CenteringVector) else np.asarray(s, dtype=float)
        if not np.array_equal(w, CenteringVector.nystrom(m + n, m).weights):
            raise ValueError("block-restricted expansion requires the Nyström centering")
    A = np.zeros((m, m))
    B = np.zeros((m, n))
    for i in range(m):
        for j in range(i + 1, m + n):
            d = E[i, j] if j < m else F[i, j - m]
            v11, v12 = nystrom_dual_blocks(i, j, m, n)
            A += d * v11
            B += d * v12
    return A, B

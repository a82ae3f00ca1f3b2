"""Point configurations, squared distance matrices and double-centering.

Points are stored column-wise: an ``r x p`` coordinate matrix whose first
``m`` columns are anchors and remaining ``n = p - m`` columns are mobiles.
All indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

__all__ = [
    "PointConfig",
    "SquaredDistanceMatrix",
    "GramMatrix",
    "CenteringVector",
    "squared_edm",
    "double_center",
    "mds_embed",
    "gower_origin_distances",
    "validate_edm",
    "procrustes_align",
    "sorted_eigh",
    "spectral_coords",
    "random_points",
]

SUM_TOL = 1e-12


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_split(m: int, p: int) -> int:
    m = int(m)
    if not 1 <= m < p:
        raise ValueError(f"split m={m} must satisfy 1 <= m < p={p}")
    return m


@dataclass(frozen=True, eq=False)
class PointConfig:
    """``r x p`` coordinates with anchors in the first ``m`` columns."""

    coords: np.ndarray
    m: int

    def __post_init__(self):
        coords = _frozen(self.coords, 2)
        if coords.shape[0] < 1:
            raise ValueError("need at least one spatial dimension")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "m", _check_split(self.m, coords.shape[1]))

    @property
    def r(self) -> int:
        return self.coords.shape[0]

    @property
    def p(self) -> int:
        return self.coords.shape[1]

    @property
    def n(self) -> int:
        return self.p - self.m

    @property
    def X(self) -> np.ndarray:
        return self.coords[:, : self.m]

    @property
    def Y(self) -> np.ndarray:
        return self.coords[:, self.m :]

    def diameter(self) -> float:
        if self.p < 2:
            return 0.0
        return float(np.sqrt(pdist(self.coords.T, "sqeuclidean").max()))


@dataclass(frozen=True, eq=False)
class SquaredDistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal ``p x p`` matrix split at ``m``.

    Blocks: ``E`` anchor-anchor, ``F`` anchor-mobile, ``G`` mobile-mobile.
    """

    entries: np.ndarray
    m: int
    tol: float = 1e-12

    def __post_init__(self):
        D = _frozen(self.entries, 2)
        p = D.shape[0]
        if D.shape != (p, p):
            raise ValueError(f"distance matrix must be square, got {D.shape}")
        scale = max(1.0, float(np.abs(D).max(initial=0.0)))
        if np.abs(D - D.T).max(initial=0.0) > self.tol * scale:
            raise ValueError("distance matrix is not symmetric")
        if np.abs(np.diag(D)).max(initial=0.0) > self.tol * scale:
            raise ValueError("distance matrix has a nonzero diagonal")
        if D.min(initial=0.0) < -self.tol * scale:
            raise ValueError("distance matrix has negative entries")
        object.__setattr__(self, "entries", D)
        object.__setattr__(self, "m", _check_split(self.m, p))

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.p - self.m

    @property
    def E(self) -> np.ndarray:
        return self.entries[: self.m, : self.m]

    @property
    def F(self) -> np.ndarray:
        return self.entries[: self.m, self.m :]

    @property
    def G(self) -> np.ndarray:
        return self.entries[self.m :, self.m :]


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric ``p x p`` inner-product matrix with blocks ``A``, ``B``, ``C``."""

    entries: np.ndarray
    m: int

    def __post_init__(self):
        K = _frozen(self.entries, 2)
        p = K.shape[0]
        if K.shape != (p, p):
            raise ValueError(f"Gram matrix must be square, got {K.shape}")
        scale = max(1.0, float(np.abs(K).max(initial=0.0)))
        if np.abs(K - K.T).max(initial=0.0) > 1e-10 * scale:
            raise ValueError("Gram matrix is not symmetric")
        object.__setattr__(self, "entries", K)
        object.__setattr__(self, "m", _check_split(self.m, p))

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def A(self) -> np.ndarray:
        return self.entries[: self.m, : self.m]

    @property
    def B(self) -> np.ndarray:
        return self.entries[: self.m, self.m :]

    @property
    def C(self) -> np.ndarray:
        return self.entries[self.m :, self.m :]


@dataclass(frozen=True, eq=False)
class CenteringVector:
    """Weights ``s`` with ``sum(s) == 1``; the embedding satisfies ``P @ s == 0``."""

    weights: np.ndarray

    def __post_init__(self):
        s = _frozen(self.weights, 1)
        if s.size == 0:
            raise ValueError("centering vector is empty")
        if abs(s.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"centering weights sum to {s.sum()!r}, not 1")
        object.__setattr__(self, "weights", s)

    @property
    def p(self) -> int:
        return self.weights.size

    @property
    def norm_sq(self) -> float:
        return float(self.weights @ self.weights)

    @classmethod
    def uniform(cls, p: int) -> "CenteringVector":
        """Classical MDS centering (centroid at the origin)."""
        return cls(np.full(p, 1.0 / p))

    @classmethod
    def nystrom(cls, p: int, m: int) -> "CenteringVector":
        """``1/m`` on the first ``m`` entries: anchor centroid at the origin."""
        if not 1 <= m <= p:
            raise ValueError(f"need 1 <= m <= p, got m={m}, p={p}")
        s = np.zeros(p)
        s[:m] = 1.0 / m
        return cls(s)

    @classmethod
    def point(cls, p: int, i: int) -> "CenteringVector":
        """Put point ``i`` at the origin."""
        s = np.zeros(p)
        s[i] = 1.0
        return cls(s)


def _weights(s, p: int) -> np.ndarray:
    if not isinstance(s, CenteringVector):
        s = CenteringVector(s)
    if s.p != p:
        raise ValueError(f"centering vector has length {s.p}, expected {p}")
    return s.weights


def squared_edm(points: PointConfig) -> SquaredDistanceMatrix:
    D = squareform(pdist(points.coords.T, "sqeuclidean"))
    return SquaredDistanceMatrix(D, points.m)


def double_center(D: SquaredDistanceMatrix, s) -> GramMatrix:
    """Return ``-1/2 (I - 1 s^T) D (I - s 1^T)`` for any ``s`` summing to one."""
    w = _weights(s, D.p)
    Dm = D.entries
    Ds = Dm @ w
    sDs = float(w @ Ds)
    K = -0.5 * (Dm - Ds[:, None] - Ds[None, :] + sDs)
    return GramMatrix(0.5 * (K + K.T), D.m)


def sorted_eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix, eigenvalues descending, ties by index."""
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def spectral_coords(M: np.ndarray, r: int) -> np.ndarray:
    """``r x k`` coordinates from the top-``r`` eigenpairs of a symmetric ``k x k`` matrix.

    Negative eigenvalues are clamped to zero before taking square roots.
    """
    M = np.asarray(M, dtype=float)
    if r < 1:
        raise ValueError("embedding dimension r must be >= 1")
    if r > M.shape[0]:
        raise ValueError(f"embedding dimension r={r} exceeds p={M.shape[0]}")
    vals, vecs = sorted_eigh(M)
    scale = np.sqrt(np.clip(vals[:r], 0.0, None))
    return scale[:, None] * vecs[:, :r].T


def mds_embed(K: GramMatrix, r: int) -> PointConfig:
    """Classical MDS coordinates of a Gram matrix, see :func:`spectral_coords`."""
    return PointConfig(spectral_coords(K.entries, r), K.m)


def gower_origin_distances(D: SquaredDistanceMatrix, s) -> np.ndarray:
    """Squared norms of the points embedded with centering ``s``: ``Ds - (s^T D s)/2``."""
    w = _weights(s, D.p)
    Ds = D.entries @ w
    return Ds - 0.5 * float(w @ Ds)


def validate_edm(D: SquaredDistanceMatrix, tol: float = 1e-9) -> bool:
    """Schoenberg test: ``-1/2 J D J`` must be positive semidefinite."""
    K = double_center(D, CenteringVector.uniform(D.p)).entries
    scale = np.linalg.norm(D.entries)
    lam_min = np.linalg.eigvalsh(K)[0]
    return bool(lam_min >= -tol * scale)


def procrustes_align(
    estimate: PointConfig, reference: PointConfig
) -> tuple[PointConfig, float]:
    """Best orthogonal transform plus translation of ``estimate`` onto ``reference``.

    Reflections are allowed. Returns the aligned configuration and the
    root-mean-square point error after alignment.
    """
    if estimate.coords.shape != reference.coords.shape:
        raise ValueError(
            f"shape mismatch: estimate {estimate.coords.shape}, "
            f"reference {reference.coords.shape}"
        )
    P = estimate.coords
    Q = reference.coords
    mu_p = P.mean(axis=1, keepdims=True)
    mu_q = Q.mean(axis=1, keepdims=True)
    U, _, Vt = np.linalg.svd((Q - mu_q) @ (P - mu_p).T)
    R = U @ Vt
    aligned = R @ (P - mu_p) + mu_q
    rmse = float(np.sqrt(np.mean(np.sum((aligned - Q) ** 2, axis=0))))
    return PointConfig(aligned, estimate.m), rmse


def random_points(p: int, m: int, r: int, low: float = 0.0, high: float = 1.0,
                  seed=None) -> PointConfig:
    """Points drawn uniformly from the box ``[low, high]^r``, anchors first."""
    if high <= low:
        raise ValueError(f"empty region: low={low}, high={high}")
    rng = np.random.default_rng(seed)
    return PointConfig(rng.uniform(low, high, size=(r, p)), m)

"""Recover a configuration from partially observed anchor-mobile distances.

Two routes are available:

``nuclear_norm``
    Minimize the nuclear norm of ``B`` subject to the reduced observations
    and zero column sums, then Nyström-complete ``K`` and embed it.
``anchored_ls``
    Embed the anchors from ``A`` and solve, per mobile, the linear system
    ``(x_i - x_{m-1})^T y_j = reduced[i, j]``.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import PointConfig, mds_embed, procrustes_align, spectral_coords
from .nystrom import center_blocks, nystrom_complete
from .sampling import ObservationSet

__all__ = [
    "SolverConfig",
    "RecoveryReport",
    "NuclearNormResult",
    "ConvergenceWarning",
    "svt",
    "nuclear_norm",
    "feasible_projector",
    "recover_B_nuclear",
    "recover_Y_anchored",
    "recover_configuration",
    "recovery_rmse",
]

log = logging.getLogger(__name__)

METHODS = ("nuclear_norm", "anchored_ls")


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SolverConfig:
    method: str = "anchored_ls"
    r: int = 2
    max_iters: int = 5000
    primal_tol: float = 1e-8
    penalty: float = 1.0
    rank_tol: float = 1e-10
    adapt_penalty: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("primal_tol", "penalty", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


@dataclass
class RecoveryReport:
    recovered_points: PointConfig
    method: str
    objective_history: list[float] = field(default_factory=list)
    residual: float = 0.0
    underdetermined_columns: list[int] = field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")

    def to_dict(self) -> dict:
        d = asdict(self)
        pts = self.recovered_points
        d["recovered_points"] = {"m": pts.m, "r": pts.r, "coords": pts.coords.T.tolist()}
        return d


# -- nuclear-norm route ------------------------------------------------------


def svt(M: np.ndarray, tau: float) -> np.ndarray:
    """Singular value soft-thresholding, the prox of ``tau * ||.||_*``."""
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    k = np.count_nonzero(s)
    return (U[:, :k] * s[:k]) @ Vt[:k]


def nuclear_norm(M: np.ndarray) -> float:
    return float(np.linalg.svd(M, compute_uv=False).sum())


def feasible_projector(obs: ObservationSet, scale: float = 1.0):
    """Euclidean projection onto ``{B : B 1-col-sums = 0, <B, w_ij> = reduced_ij / scale}``.

    In each column the last anchor row and the sampled rows are tied
    together by the observed differences; after removing the column mean,
    that group is replaced by its constrained average.
    """
    m, n = obs.m, obs.n
    mask = np.zeros((m, n), dtype=bool)
    mask[m - 1] = True
    offsets = np.zeros((m, n))
    rows, cols = obs.pairs[:, 0], obs.pairs[:, 1]
    mask[rows, cols] = True
    offsets[rows, cols] = obs.reduced / scale
    group = mask.sum(axis=0)

    def project(X: np.ndarray) -> np.ndarray:
        Xc = X - X.mean(axis=0)
        mu = np.where(mask, Xc - offsets, 0.0).sum(axis=0) / group
        return np.where(mask, mu + offsets, Xc)

    return project


@dataclass
class NuclearNormResult:
    """ADMM output.

    ``B`` is the best feasible iterate; ``objective_history`` holds its
    nuclear norm after each iteration and ``iterate_objectives`` the nuclear
    norm of the raw iterate, which need not decrease monotonically.
    """

    B: np.ndarray
    objective_history: list[float]
    iterate_objectives: list[float]
    converged: bool
    iterations: int
    residual: float


def constraint_residual(B: np.ndarray, obs: ObservationSet) -> float:
    """Largest violation of ``B[i,j] - B[m-1,j] = reduced[i,j]`` over the samples."""
    if len(obs.pairs) == 0:
        return 0.0
    rows, cols = obs.pairs[:, 0], obs.pairs[:, 1]
    diff = B[rows, cols] - B[obs.m - 1, cols]
    return float(np.abs(diff - obs.reduced).max())


def _admm_nuclear(obs: ObservationSet, cfg: SolverConfig) -> NuclearNormResult:
    # Work on data normalized by the spectral norm of the minimum-norm
    # feasible point so penalty and residual balancing are unit-free.
    B0 = feasible_projector(obs)(np.zeros((obs.m, obs.n)))
    c = float(np.linalg.norm(B0, 2)) or 1.0
    project = feasible_projector(obs, c)

    rho = cfg.penalty
    B = B0 / c
    Z = B.copy()
    U = np.zeros_like(B)
    best, best_obj = B, nuclear_norm(B)
    history: list[float] = []
    raw: list[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        B = project(Z - U)
        Z_old = Z
        Z = svt(B + U, 1.0 / rho)
        U += B - Z
        obj = nuclear_norm(B)
        if obj <= best_obj:
            best, best_obj = B, obj
        raw.append(c * obj)
        history.append(c * best_obj)

        scale = max(1.0, np.linalg.norm(B))
        r_primal = np.linalg.norm(B - Z)
        r_change = np.linalg.norm(Z - Z_old)
        if r_primal < cfg.primal_tol * scale and r_change < cfg.primal_tol * scale:
            converged = True
            break
        if cfg.adapt_penalty:
            r_dual = rho * r_change
            if r_primal > 10.0 * r_dual:
                rho *= 2.0
                U /= 2.0
            elif r_dual > 10.0 * r_primal:
                rho /= 2.0
                U *= 2.0
    B = c * best
    return NuclearNormResult(B, history, raw, converged, it, constraint_residual(B, obs))


def recover_B_nuclear(obs: ObservationSet, cfg: SolverConfig | None = None, *, full: bool = False):
    """Minimum nuclear norm ``B`` consistent with the observations.

    Solved by ADMM alternating a projection onto the affine constraint set
    with singular value soft-thresholding. Every ``B`` iterate is feasible
    and the one with the smallest nuclear norm is returned. Emits :class:`ConvergenceWarning` if ``max_iters`` is reached;
    pass ``full=True`` to get a :class:`NuclearNormResult` with diagnostics.
    """
    cfg = cfg or SolverConfig(method="nuclear_norm")
    if cfg.method != "nuclear_norm":
        raise ValueError("recover_B_nuclear requires method='nuclear_norm'")
    res = _admm_nuclear(obs, cfg)
    if not res.converged:
        log.warning("nuclear-norm solver stopped after %d iterations", res.iterations)
        warnings.warn(
            f"nuclear-norm solver did not converge in {res.iterations} iterations",
            ConvergenceWarning,
            stacklevel=2,
        )
    return res if full else res.B


# -- anchored least-squares route ------------------------------------------------


def _anchor_coords(obs: ObservationSet, anchors, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Anchor coordinates centered at their centroid, plus the centroid."""
    if anchors is None:
        A, _ = center_blocks(obs.E, np.zeros((obs.m, 0)))
        X = spectral_coords(A, r)
        return X, np.zeros((r, 1))
    X = np.asarray(anchors.X if isinstance(anchors, PointConfig) else anchors, dtype=float)
    if X.shape != (r, obs.m):
        raise ValueError(f"anchor coordinates have shape {X.shape}, expected ({r}, {obs.m})")
    mu = X.mean(axis=1, keepdims=True)
    return X - mu, mu


def _solve_anchored(obs: ObservationSet, X: np.ndarray, r: int):
    m, n = obs.m, obs.n
    diffs = (X[:, : m - 1] - X[:, m - 1 : m]).T  # (m-1) x r
    if m < 2:
        raise ValueError("anchored solver needs at least two anchors")
    sv = np.linalg.svd(diffs, compute_uv=False)
    tol = max(diffs.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    span = int(np.count_nonzero(sv > tol))
    if span < r:
        raise ValueError(
            f"anchors are affinely rank-deficient: differences to the last anchor "
            f"span {span} < r={r} dimensions"
        )
    Y = np.zeros((r, n))
    under: list[int] = []
    resid = 0.0
    rows, cols = obs.pairs[:, 0], obs.pairs[:, 1]
    bounds = np.searchsorted(cols, np.arange(n + 1))
    for j in range(n):
        sl = slice(bounds[j], bounds[j + 1])
        M = diffs[rows[sl]]
        f = obs.reduced[sl]
        if len(f) == 0:
            under.append(j)
            continue
        y, _, rank, _ = np.linalg.lstsq(M, f, rcond=None)
        if rank < r:
            under.append(j)
        Y[:, j] = y
        resid = max(resid, float(np.abs(M @ y - f).max()))
    return Y, under, resid


def recover_Y_anchored(obs: ObservationSet, anchors=None, cfg: SolverConfig | None = None) -> np.ndarray:
    """Mobile coordinates ``Y`` (``r x n``) by per-column linear least squares.

    ``anchors`` may be a :class:`PointConfig`, an ``r x m`` array, or ``None``
    to embed the anchors from ``E``. The result is expressed in the same
    frame as the anchors. Columns with fewer than ``r`` independent
    constraints receive the minimum-norm solution.
    """
    cfg = cfg or SolverConfig()
    X, mu = _anchor_coords(obs, anchors, cfg.r)
    Y, _, _ = _solve_anchored(obs, X, cfg.r)
    return Y + mu


def recover_configuration(obs: ObservationSet, cfg: SolverConfig | None = None, anchors=None) -> RecoveryReport:
    """Run the configured solver end to end and report diagnostics."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    if cfg.method == "anchored_ls":
        X, mu = _anchor_coords(obs, anchors, cfg.r)
        Y, under, resid = _solve_anchored(obs, X, cfg.r)
        coords = np.hstack([X, Y]) + mu
        report = RecoveryReport(
            PointConfig(coords, obs.m),
            cfg.method,
            residual=resid,
            underdetermined_columns=under,
        )
    else:
        res = recover_B_nuclear(obs, cfg, full=True)
        A, _ = center_blocks(obs.E, np.zeros((obs.m, 0)))
        K = nystrom_complete(A, res.B, cfg.rank_tol)
        counts = np.bincount(obs.pairs[:, 1], minlength=obs.n)
        report = RecoveryReport(
            mds_embed(K, cfg.r),
            cfg.method,
            objective_history=res.objective_history,
            residual=res.residual,
            underdetermined_columns=np.flatnonzero(counts < cfg.r).tolist(),
            converged=res.converged,
            iterations=res.iterations,
        )
    report.wall_time = time.perf_counter() - t0
    return report


def recovery_rmse(estimate: PointConfig, reference: PointConfig, exclude=()) -> float:
    """Procrustes RMSE over all points except the listed mobile columns."""
    keep = np.ones(reference.p, dtype=bool)
    keep[[reference.m + j for j in exclude]] = False
    est = PointConfig(estimate.coords[:, keep], estimate.m)
    ref = PointConfig(reference.coords[:, keep], reference.m)
    return procrustes_align(est, ref)[1]

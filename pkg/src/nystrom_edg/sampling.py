"""Observation model: full anchor block, one full anchor row of F, random
samples from the remaining anchor rows.

The fully observed row is always the last anchor (index ``m - 1``); use
:func:`move_anchor_last` to designate a different one. Sampled pairs are
``(i, j)`` with ``0 <= i < m - 1`` and ``0 <= j < n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PointConfig, SquaredDistanceMatrix
from .laplacian import anchor_row_sums

__all__ = [
    "SampleSet",
    "ObservationSet",
    "draw_samples",
    "observe",
    "reduce_observations",
    "per_column_counts",
    "underdetermined_columns",
    "move_anchor_last",
]

MODES = ("bernoulli", "fixed", "per_column")


def _pairs_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    arr = np.unique(arr, axis=0) if arr.size else arr
    # column-major order keeps each mobile's samples contiguous
    order = np.lexsort((arr[:, 0], arr[:, 1]))
    arr = arr[order]
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampleSet:
    m: int
    n: int
    pairs: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        raw = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        arr = _pairs_array(raw)
        if len(arr) != len(raw):
            raise ValueError("duplicate sample pairs")
        if arr.size and (
            arr[:, 0].min() < 0
            or arr[:, 0].max() >= self.m - 1
            or arr[:, 1].min() < 0
            or arr[:, 1].max() >= self.n
        ):
            raise ValueError(
                f"sample indices out of range for m={self.m}, n={self.n} "
                "(the last anchor row is implicit and may not be sampled)"
            )
        object.__setattr__(self, "pairs", arr)

    def __len__(self) -> int:
        return len(self.pairs)

    def mask(self) -> np.ndarray:
        """Boolean ``(m-1) x n`` indicator of sampled entries."""
        M = np.zeros((self.m - 1, self.n), dtype=bool)
        M[self.pairs[:, 0], self.pairs[:, 1]] = True
        return M

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "seed": self.seed,
            "pairs": self.pairs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleSet":
        return cls(int(d["m"]), int(d["n"]), d.get("pairs", []), d.get("seed"))


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Everything the solvers may see.

    ``samples`` holds ``F[i, j]`` for each row of ``pairs``; ``reduced``
    holds ``B[i, j] - B[m-1, j]`` computed from the samples, the full last
    anchor row and ``E``.
    """

    E: np.ndarray
    f_row_m: np.ndarray
    pairs: np.ndarray
    samples: np.ndarray
    reduced: np.ndarray = field(default=None)
    seed: int | None = None

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        f_row = np.array(self.f_row_m, dtype=float)
        raw = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        vals = np.array(self.samples, dtype=float).reshape(-1)
        if len(vals) != len(raw):
            raise ValueError("pairs and samples differ in length")
        order = np.lexsort((raw[:, 0], raw[:, 1])) if len(raw) else np.arange(0)
        pairs, vals = raw[order], vals[order]
        m, n = E.shape[0], f_row.size
        SampleSet(m, n, pairs)  # range and duplicate checks
        red = reduce_observations(E, f_row, pairs, vals)
        for a in (E, f_row, pairs, vals, red):
            a.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "f_row_m", f_row)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "samples", vals)
        object.__setattr__(self, "reduced", red)

    @property
    def m(self) -> int:
        return self.E.shape[0]

    @property
    def n(self) -> int:
        return self.f_row_m.size

    def sample_set(self) -> SampleSet:
        return SampleSet(self.m, self.n, self.pairs, self.seed)

    def sample_map(self) -> dict[tuple[int, int], float]:
        return {(int(i), int(j)): float(v) for (i, j), v in zip(self.pairs, self.samples)}

    def reduced_map(self) -> dict[tuple[int, int], float]:
        return {(int(i), int(j)): float(v) for (i, j), v in zip(self.pairs, self.reduced)}

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "seed": self.seed,
            "E": self.E.tolist(),
            "f_row_m": self.f_row_m.tolist(),
            "samples": [
                [int(i), int(j), float(v)] for (i, j), v in zip(self.pairs, self.samples)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObservationSet":
        trip = d.get("samples", [])
        pairs = [(int(t[0]), int(t[1])) for t in trip]
        vals = [float(t[2]) for t in trip]
        return cls(d["E"], d["f_row_m"], pairs, vals, seed=d.get("seed"))


def reduce_observations(E, f_row_m, pairs, values) -> np.ndarray:
    """``-(F[i,j] - F[m-1,j])/2 + g_i`` with ``g_i = sum_t (E[i,t] - E[m-1,t]) / 2m``."""
    E = np.asarray(E, dtype=float)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    m = E.shape[0]
    rs = anchor_row_sums(E)
    g = (rs - rs[m - 1]) / (2 * m)
    rows, cols = pairs[:, 0], pairs[:, 1]
    return -0.5 * (np.asarray(values, dtype=float) - np.asarray(f_row_m)[cols]) + g[rows]


def draw_samples(
    m: int,
    n: int,
    rate: float,
    seed: int | None = None,
    mode: str = "bernoulli",
    count: int | None = None,
) -> SampleSet:
    """Random subset of the ``(m-1) n`` sampleable anchor-mobile entries.

    ``bernoulli`` keeps each entry independently with probability ``rate``;
    ``fixed`` draws ``round(rate * (m-1) n)`` entries uniformly without
    replacement; ``per_column`` draws ``count`` distinct rows in every
    column (``count`` defaults to ``round(rate * (m-1))``).
    Uses numpy's PCG64 generator seeded with ``seed``.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"sampling rate {rate} outside [0, 1]")
    if mode not in MODES:
        raise ValueError(f"unknown sampling mode {mode!r}; choose from {MODES}")
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = m - 1
    if mode == "bernoulli":
        keep = rng.random((n, rows)) < rate
        j, i = np.nonzero(keep)
        pairs = np.column_stack([i, j])
    elif mode == "fixed":
        total = rows * n
        k = int(round(rate * total))
        flat = rng.choice(total, size=k, replace=False)
        j, i = np.divmod(flat, rows) if rows else (flat, flat)
        pairs = np.column_stack([i, j])
    else:
        k = int(round(rate * rows)) if count is None else int(count)
        if not 0 <= k <= rows:
            raise ValueError(f"per-column count {k} outside [0, {rows}]")
        pairs = np.array(
            [(i, j) for j in range(n) for i in rng.choice(rows, size=k, replace=False)],
            dtype=np.int64,
        ).reshape(-1, 2)
    return SampleSet(m, n, pairs, seed)


def observe(D, omega: SampleSet) -> ObservationSet:
    """Collect the observations allowed by the sampling model.

    Only the ``E`` and ``F`` blocks of ``D`` are read.
    """
    E = np.asarray(D.E, dtype=float)
    F = np.asarray(D.F, dtype=float)
    m, n = F.shape
    if (omega.m, omega.n) != (m, n):
        raise ValueError(
            f"sample set is for m={omega.m}, n={omega.n}; distances have m={m}, n={n}"
        )
    pr = omega.pairs
    return ObservationSet(E, F[m - 1], pr, F[pr[:, 0], pr[:, 1]], seed=omega.seed)


def per_column_counts(omega: SampleSet) -> np.ndarray:
    return np.bincount(omega.pairs[:, 1], minlength=omega.n)


def underdetermined_columns(omega: SampleSet, r: int) -> list[int]:
    """Mobile columns with fewer than ``r`` sampled rows."""
    return np.flatnonzero(per_column_counts(omega) < r).tolist()


def move_anchor_last(obj, anchor: int):
    """Swap anchor ``anchor`` with the last anchor.

    Works on a :class:`PointConfig` (columns) or a
    :class:`SquaredDistanceMatrix` (rows and columns).
    """
    m = obj.m
    if not 0 <= anchor < m:
        raise IndexError(f"anchor {anchor} out of range for m={m}")
    perm = np.arange(obj.p)
    perm[[anchor, m - 1]] = perm[[m - 1, anchor]]
    if isinstance(obj, PointConfig):
        return PointConfig(obj.coords[:, perm], m)
    if isinstance(obj, SquaredDistanceMatrix):
        return SquaredDistanceMatrix(obj.entries[np.ix_(perm, perm)], m)
    raise TypeError(f"cannot permute {type(obj).__name__}")

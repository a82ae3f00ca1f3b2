"""CSV and JSON formats.

* points: one row per point with header ``x1,...,xr``; anchors first; the
  split lives in a sidecar JSON ``{"m": int, "r": int}`` next to the CSV;
* distance matrices: the full ``p x p`` array, no header;
* sample sets and observation sets: JSON, see ``to_dict`` on each type.

Floats are written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import PointConfig, SquaredDistanceMatrix
from .sampling import ObservationSet, SampleSet

FLOAT_FMT = "%.17g"


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_points(path, points: PointConfig, meta_path=None) -> None:
    path = Path(path)
    header = ",".join(f"x{k + 1}" for k in range(points.r))
    np.savetxt(path, points.coords.T, delimiter=",", header=header, comments="", fmt=FLOAT_FMT)
    write_json(meta_path or sidecar_path(path), {"m": points.m, "r": points.r})


def read_points(path, meta_path=None, m: int | None = None) -> PointConfig:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    coords = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if coords.shape[1] != len(header):
        raise ValueError(f"{path}: header has {len(header)} columns, rows have {coords.shape[1]}")
    if m is None:
        meta = read_json(meta_path or sidecar_path(path))
        m = int(meta["m"])
        if int(meta.get("r", coords.shape[1])) != coords.shape[1]:
            raise ValueError(f"{path}: metadata r={meta['r']} but CSV has {coords.shape[1]} columns")
    return PointConfig(coords.T, m)


def write_matrix(path, M) -> None:
    np.savetxt(path, np.asarray(M), delimiter=",", fmt=FLOAT_FMT)


def read_matrix(path, max_rows: int | None = None) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2, max_rows=max_rows)


def write_distances(path, D: SquaredDistanceMatrix) -> None:
    write_matrix(path, D.entries)


def read_distances(path, m: int) -> SquaredDistanceMatrix:
    return SquaredDistanceMatrix(read_matrix(path), m)


class AnchorRows:
    """The first ``m`` rows of a distance matrix file; ``G`` is never loaded."""

    def __init__(self, path, m: int):
        rows = read_matrix(path, max_rows=m)
        if rows.shape[0] != m or rows.shape[1] <= m:
            raise ValueError(f"{path}: expected at least {m} rows and more than {m} columns")
        self.m = m
        self.E = rows[:, :m]
        self.F = rows[:, m:]


def write_samples(path, omega: SampleSet) -> None:
    write_json(path, omega.to_dict())


def read_samples(path) -> SampleSet:
    return SampleSet.from_dict(read_json(path))


def write_observations(path, obs: ObservationSet) -> None:
    write_json(path, obs.to_dict())


def read_observations(path) -> ObservationSet:
    return ObservationSet.from_dict(read_json(path))

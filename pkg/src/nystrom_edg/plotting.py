"""Report figures written next to the CSV/JSON outputs."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .geometry import CenteringVector, PointConfig, SquaredDistanceMatrix, double_center, mds_embed

ANCHOR_STYLE = dict(marker="^", s=60, c="tab:red", edgecolors="k", linewidths=0.5, zorder=3)
MOBILE_STYLE = dict(marker="o", s=14, c="tab:blue", alpha=0.7, zorder=2)
ESTIMATE_STYLE = dict(marker="x", s=18, c="tab:orange", linewidths=0.8, zorder=4)
PNG_META = {"Software": None}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata=PNG_META)
    return path


def _planar(coords: np.ndarray) -> np.ndarray:
    # first two coordinates; pad 1-d configurations with zeros
    if coords.shape[0] >= 2:
        return coords[:2]
    return np.vstack([coords, np.zeros_like(coords)])


def plot_configuration(path, points: PointConfig, estimate: PointConfig | None = None,
                       underdetermined=(), title: str | None = None) -> Path:
    """Anchors, mobiles and (optionally) an aligned estimate overlaid."""
    fig = Figure(figsize=(5.5, 5))
    ax = fig.add_subplot()
    xy = _planar(points.coords)
    m = points.m
    ax.scatter(*xy[:, m:], label="mobiles", **MOBILE_STYLE)
    ax.scatter(*xy[:, :m], label="anchors", **ANCHOR_STYLE)
    if estimate is not None:
        est = _planar(estimate.coords)
        ax.scatter(*est, label="estimate", **ESTIMATE_STYLE)
    if len(underdetermined):
        cols = [m + j for j in underdetermined]
        ax.scatter(*xy[:, cols], marker="s", s=50, facecolors="none",
                   edgecolors="tab:purple", label="underdetermined", zorder=5)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="best", fontsize=8, frameon=False)
    if title:
        ax.set_title(title, fontsize=10)
    return _save(fig, path)


def plot_objective(path, history, raw=None) -> Path:
    fig = Figure(figsize=(5.5, 3.5))
    ax = fig.add_subplot()
    it = np.arange(1, len(history) + 1)
    if raw is not None and len(raw):
        ax.plot(it, raw, lw=0.8, c="0.6", label="iterate")
    ax.plot(it, history, lw=1.5, c="tab:blue", label="best feasible")
    ax.set_xlabel("iteration")
    ax.set_ylabel("nuclear norm of B")
    ax.set_xscale("log")
    ax.legend(fontsize=8, frameon=False)
    return _save(fig, path)


def plot_centerings(path, D: SquaredDistanceMatrix, centerings) -> Path:
    """One panel per centering vector: the embedding it induces, origin marked."""
    centerings = [c if isinstance(c, CenteringVector) else CenteringVector(c) for c in centerings]
    fig = Figure(figsize=(3.2 * len(centerings), 3.4))
    axes = fig.subplots(1, len(centerings), squeeze=False)[0]
    for ax, s in zip(axes, centerings):
        P = _planar(mds_embed(double_center(D, s), min(2, D.p)).coords)
        closed = np.hstack([P, P[:, :1]])
        ax.plot(*closed, c="0.4", lw=1)
        ax.scatter(*P, c="tab:blue", zorder=3)
        for k in range(P.shape[1]):
            ax.annotate(str(k + 1), P[:, k], textcoords="offset points", xytext=(4, 4), fontsize=8)
        ax.scatter([0], [0], marker="+", s=80, c="tab:red", zorder=4)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_title("s = (" + ", ".join(f"{w:g}" for w in s.weights) + ")", fontsize=9)
    return _save(fig, path)


def plot_error_histogram(path, errors) -> Path:
    fig = Figure(figsize=(5, 3.2))
    ax = fig.add_subplot()
    errors = np.asarray(errors, dtype=float)
    positive = errors[errors > 0]
    if positive.size:
        bins = np.logspace(np.log10(positive.min()), np.log10(positive.max()) + 1e-12, 30)
        ax.hist(positive, bins=bins, color="tab:blue", alpha=0.8)
        ax.set_xscale("log")
    ax.set_xlabel("per-point error after alignment")
    ax.set_ylabel("count")
    return _save(fig, path)

"""Command-line interface.

Every command reads an optional JSON config (``--config``); explicit flags
override config keys. Inputs default to files inside ``--out`` so that a
``generate -> sample -> solve -> evaluate`` pipeline can share one directory.

Exit codes: 0 success, 1 solver non-convergence, 2 I/O or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .geometry import PointConfig, procrustes_align, random_points, squared_edm, validate_edm
from .sampling import draw_samples, observe, per_column_counts
from .solvers import SolverConfig, recover_configuration, recovery_rmse

log = logging.getLogger("nystrom_edg")

DEFAULTS = {
    "generate": {"p": 60, "m": 10, "r": 2, "low": 0.0, "high": 1.0, "seed": 0},
    "sample": {"rate": 0.3, "mode": "bernoulli", "count": None, "seed": 0,
               "distances": None, "metadata": None, "m": None},
    "solve": {"method": "anchored_ls", "r": 2, "max_iters": 5000, "primal_tol": 1e-8,
              "penalty": 1.0, "rank_tol": 1e-10, "observations": None,
              "anchors": None, "reference": None},
    "evaluate": {"report": None},
    "bench-paper": {"scale": 1.0, "seed": 0, "r": 2},
}


class CLIError(Exception):
    """Invalid input or configuration (exit code 2)."""


def _config(args, command: str) -> dict:
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            loaded = io.read_json(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CLIError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise CLIError(f"unknown config keys for '{command}': {', '.join(unknown)}")
        cfg.update(loaded)
    for key in ("seed", "rate", "method", "scale"):
        val = getattr(args, key, None)
        if val is not None and key in cfg:
            cfg[key] = val
    return cfg


def _require_int(cfg: dict, key: str, low: int = 1) -> int:
    val = cfg.get(key)
    if isinstance(val, bool) or not isinstance(val, (int, np.integer)) or val < low:
        raise CLIError(f"config field '{key}' must be an integer >= {low}, got {val!r}")
    return int(val)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _path(value, default: Path) -> Path:
    path = Path(value) if value else default
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    return path


# -- commands -----------------------------------------------------------------


def cmd_generate(args) -> int:
    cfg = _config(args, "generate")
    p, m, r = (_require_int(cfg, k) for k in ("p", "m", "r"))
    if not m < p:
        raise CLIError(f"config field 'm' must be smaller than 'p' (m={m}, p={p})")
    try:
        low, high = float(cfg["low"]), float(cfg["high"])
    except (TypeError, ValueError) as exc:
        raise CLIError(f"config fields 'low'/'high' must be numbers: {exc}") from exc
    if not high > low:
        raise CLIError(f"config field 'high' must exceed 'low' ({low} >= {high})")
    out = _out_dir(args)
    points = random_points(p, m, r, low, high, seed=cfg["seed"])
    D = squared_edm(points)
    io.write_points(out / "points.csv", points)
    io.write_distances(out / "distances.csv", D)
    summary = {"p": p, "m": m, "r": r, "seed": cfg["seed"], "valid_edm": validate_edm(D)}
    if not args.no_figures:
        from .plotting import plot_configuration

        plot_configuration(out / "scenario.png", points, title=f"p={p}, m={m}, seed={cfg['seed']}")
    print(json.dumps(summary))
    return 0


def cmd_sample(args) -> int:
    cfg = _config(args, "sample")
    rate = float(cfg["rate"])
    if not 0.0 <= rate <= 1.0:
        raise CLIError(f"rate {rate} out of range [0, 1]")
    out = _out_dir(args)
    dist_path = _path(cfg["distances"], out / "distances.csv")
    if cfg["m"] is not None:
        m = _require_int(cfg, "m")
    else:
        m = int(io.read_json(_path(cfg["metadata"], out / "points.json"))["m"])
    # only the anchor rows are read; the mobile-mobile block stays on disk
    rows = io.AnchorRows(dist_path, m)
    try:
        omega = draw_samples(m, rows.F.shape[1], rate, seed=cfg["seed"],
                             mode=cfg["mode"], count=cfg["count"])
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    obs = observe(rows, omega)
    io.write_samples(out / "samples.json", omega)
    io.write_observations(out / "observations.json", obs)
    counts = per_column_counts(omega)
    print(json.dumps({"m": m, "n": int(rows.F.shape[1]), "samples": len(omega),
                      "min_per_column": int(counts.min()), "max_per_column": int(counts.max())}))
    return 0


def cmd_solve(args) -> int:
    cfg = _config(args, "solve")
    out = _out_dir(args)
    obs = io.read_observations(_path(cfg["observations"], out / "observations.json"))
    try:
        solver_cfg = SolverConfig.from_dict(cfg)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"invalid solver configuration: {exc}") from exc
    anchors = None
    if cfg["anchors"]:
        anchors = io.read_points(_path(cfg["anchors"], Path()))
    report = recover_configuration(obs, solver_cfg, anchors=anchors)
    result = report.to_dict()
    reference = None
    if cfg["reference"]:
        reference = io.read_points(_path(cfg["reference"], Path()))
        result["rmse"] = recovery_rmse(report.recovered_points, reference,
                                       exclude=report.underdetermined_columns)
    io.write_json(out / "report.json", result)
    io.write_points(out / "recovered.csv", report.recovered_points)
    if not args.no_figures:
        from .plotting import plot_configuration, plot_objective

        if reference is not None:
            aligned, _ = procrustes_align(report.recovered_points, reference)
            plot_configuration(out / "recovery.png", reference, aligned,
                               report.underdetermined_columns, title=solver_cfg.method)
        else:
            plot_configuration(out / "recovery.png", report.recovered_points,
                               underdetermined=report.underdetermined_columns,
                               title=solver_cfg.method)
        if report.objective_history:
            plot_objective(out / "objective.png", report.objective_history)
    summary = {k: result[k] for k in ("method", "converged", "iterations", "residual", "wall_time")}
    if "rmse" in result:
        summary["rmse"] = result["rmse"]
    summary["underdetermined"] = len(report.underdetermined_columns)
    print(json.dumps(summary))
    if not report.converged:
        print("error: solver did not converge", file=sys.stderr)
        return 1
    return 0


def evaluate(estimate: PointConfig, reference: PointConfig,
             underdetermined=()) -> tuple[dict, PointConfig]:
    aligned, rmse = procrustes_align(estimate, reference)
    errors = np.linalg.norm(aligned.coords - reference.coords, axis=0)
    metrics = {
        "rmse": rmse,
        "max_error": float(errors.max()),
        "per_point_error": errors.tolist(),
        "underdetermined_columns": list(underdetermined),
    }
    if len(underdetermined):
        metrics["rmse_determined"] = recovery_rmse(estimate, reference, exclude=underdetermined)
    return metrics, aligned


def cmd_evaluate(args) -> int:
    cfg = _config(args, "evaluate")
    estimate = io.read_points(_path(args.estimate, Path()))
    reference = io.read_points(_path(args.reference, Path()))
    if estimate.coords.shape != reference.coords.shape:
        raise CLIError(f"estimate has shape {estimate.coords.shape}, reference {reference.coords.shape}")
    under = []
    if cfg["report"]:
        under = io.read_json(_path(cfg["report"], Path())).get("underdetermined_columns", [])
    metrics, aligned = evaluate(estimate, reference, under)
    out = _out_dir(args)
    io.write_json(out / "metrics.json", metrics)
    if not args.no_figures:
        from .plotting import plot_configuration, plot_error_histogram

        plot_configuration(out / "alignment.png", reference, aligned, under,
                           title=f"rmse = {metrics['rmse']:.3g}")
        plot_error_histogram(out / "errors.png", metrics["per_point_error"])
    print(json.dumps({k: v for k, v in metrics.items() if k != "per_point_error"}))
    return 0


def bench_scenario(scale: float) -> tuple[int, int]:
    """``(m, n)`` for a given fraction of the 3000-mobile, 50-anchor benchmark."""
    if not scale > 0:
        raise CLIError(f"scale must be positive, got {scale}")
    n = max(1, int(round(3000 * scale)))
    m = max(20, int(round(50 * scale)))
    return m, n


def run_benchmark(scale: float = 1.0, seed: int = 0, r: int = 2) -> dict:
    m, n = bench_scenario(scale)
    t0 = time.perf_counter()
    truth = random_points(m + n, m, r, seed=seed)
    D = squared_edm(truth)
    obs = observe(D, draw_samples(m, n, 1.0, seed=seed))
    t1 = time.perf_counter()
    report = recover_configuration(obs, SolverConfig(method="anchored_ls", r=r))
    t2 = time.perf_counter()
    rmse = recovery_rmse(report.recovered_points, truth, exclude=report.underdetermined_columns)
    return {
        "m": m,
        "n": n,
        "r": r,
        "seed": seed,
        "rmse": rmse,
        "setup_time": t1 - t0,
        "solve_time": t2 - t1,
        "wall_time": t2 - t0,
        "underdetermined": len(report.underdetermined_columns),
        "_truth": truth,
        "_estimate": report.recovered_points,
    }


def cmd_bench_paper(args) -> int:
    cfg = _config(args, "bench-paper")
    result = run_benchmark(float(cfg["scale"]), int(cfg["seed"]), _require_int(cfg, "r"))
    truth, estimate = result.pop("_truth"), result.pop("_estimate")
    if args.out:
        out = _out_dir(args)
        io.write_json(out / "bench.json", result)
        if not args.no_figures:
            from .plotting import plot_configuration

            aligned, _ = procrustes_align(estimate, truth)
            plot_configuration(out / "bench.png", truth, aligned,
                               title=f"n={result['n']}, m={result['m']}, {result['wall_time']:.2f} s")
    print(json.dumps(result))
    return 0


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nystrom-edg", description="Localize mobile nodes from partially observed anchor distances.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--out", metavar="DIR", required=out_required, help="output directory")
        p.add_argument("--no-figures", action="store_true", help="skip PNG report figures")
        return p

    p = common(sub.add_parser("generate", help="random scenario: points, metadata, distances"))
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_generate)

    p = common(sub.add_parser("sample", help="draw samples and write observations"))
    p.add_argument("--seed", type=int)
    p.add_argument("--rate", type=float)
    p.set_defaults(func=cmd_sample)

    p = common(sub.add_parser("solve", help="recover the configuration from observations"))
    p.add_argument("--method", choices=("nuclear_norm", "anchored_ls"))
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("evaluate", help="Procrustes metrics of an estimate"))
    p.add_argument("estimate", help="estimated points CSV (sidecar JSON alongside)")
    p.add_argument("reference", help="reference points CSV (sidecar JSON alongside)")
    p.set_defaults(func=cmd_evaluate)

    p = common(sub.add_parser("bench-paper", help="time the anchored solver at n=3000, m=50"),
               out_required=False)
    p.add_argument("--seed", type=int)
    p.add_argument("--scale", type=float)
    p.set_defaults(func=cmd_bench_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLIError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

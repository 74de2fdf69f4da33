"""Benchmark harness: multi-run experiments, gap statistics and performance profiles.

Gap convention: gap = 100 * (Avg - BKS) / BKS, reported to four decimal places,
with Avg the mean final cost over the runs of one instance and BKS the
registered best-known value.  Quartiles use linear interpolation between
closest ranks.  Performance profiles compare algorithms by the per-instance
ratio to the best gap, with a small shift so that zero gaps stay well-defined.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .engine import RunConfig, RunReport, run
from .instances import BksRegistry, Instance, build_neighbor_lists, parse_instance

PROFILE_SHIFT = 0.0001  # one reporting ulp at 4 decimals
QUARTILE_METHOD = "linear interpolation between closest ranks"
CSV_FIELDS = ("instance", "bks", "avg", "gap", "best", "t_min")


def compute_gap(avg: float, bks: float) -> float:
    """Percentage gap of an average objective to the best known value, 4 decimals."""
    if bks <= 0:
        raise ValueError("bks must be positive")
    return round(100.0 * (avg - bks) / bks, 4)


def summarize(gaps: list[float]) -> dict[str, float]:
    """Five-number summary; quartiles by linear interpolation between closest ranks."""
    if len(gaps) == 0:
        raise ValueError("cannot summarize an empty list")
    q = np.percentile(np.asarray(gaps, dtype=np.float64), [0, 25, 50, 75, 100],
                      method="linear")
    return {"min": float(q[0]), "q1": float(q[1]), "median": float(q[2]),
            "q3": float(q[3]), "max": float(q[4])}


def performance_profile(gap_matrix: dict[str, list[float]],
                        shift: float = PROFILE_SHIFT) -> dict[str, list[tuple[float, float]]]:
    """Cumulative performance-ratio curves, one per algorithm.

    For instance i and algorithm a, the ratio is (gap + shift) / (best gap +
    shift); the curve lists (tau, fraction of instances with ratio <= tau) at
    every distinct ratio, sorted ascending.  Axis scaling is left to the
    consumer.
    """
    if not gap_matrix:
        raise ValueError("need at least one algorithm")
    lengths = {len(v) for v in gap_matrix.values()}
    if len(lengths) != 1:
        raise ValueError("all algorithms need the same instance count")
    (n_inst,) = lengths
    if n_inst < 1:
        raise ValueError("need at least one instance")
    algos = list(gap_matrix)
    mat = np.array([gap_matrix[a] for a in algos], dtype=np.float64)
    best = mat.min(axis=0)
    out: dict[str, list[tuple[float, float]]] = {}
    for row, a in enumerate(algos):
        ratios = np.sort((mat[row] + shift) / (best + shift))
        curve: list[tuple[float, float]] = []
        for i, tau in enumerate(ratios, start=1):
            point = (float(tau), i / n_inst)
            if curve and curve[-1][0] == point[0]:
                curve[-1] = point
            else:
                curve.append(point)
        out[a] = curve
    return out


@dataclass(frozen=True)
class ExperimentSpec:
    instance_paths: tuple[str, ...]
    runs: int = 1
    config: RunConfig = field(default_factory=RunConfig)
    seed_base: int = 0
    bks: BksRegistry | None = None
    workers: int = 1

    def validate(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.instance_paths:
            raise ValueError("no instances given")
        self.config.validate()


@dataclass(frozen=True)
class GapRow:
    instance: str
    bks: int | None
    avg: float
    gap: float | None
    best: int
    t_min: float

    def to_dict(self) -> dict:
        return {"instance": self.instance, "bks": self.bks, "avg": round(self.avg, 4),
                "gap": self.gap, "best": self.best, "t_min": round(self.t_min, 4)}


def _run_task(args: tuple[str, RunConfig, int]) -> tuple[str, dict]:
    path, cfg, seed = args
    inst = parse_instance(Path(path).read_text())
    report = run(inst, replace(cfg, seed=seed))
    return path, {"best_cost": report.best_cost,
                  "time_to_best": report.time_to_best_seconds,
                  "seed": seed}


def run_experiment(spec: ExperimentSpec) -> tuple[list[GapRow], dict[str, list[dict]]]:
    """Execute runs-per-instance solver runs and aggregate one GapRow per instance.

    Run r of every instance uses seed seed_base + r, so reports are identical
    whatever the worker count.
    """
    spec.validate()
    tasks = [(path, spec.config, spec.seed_base + r)
             for path in spec.instance_paths for r in range(spec.runs)]
    results: dict[str, list[dict]] = {path: [] for path in spec.instance_paths}
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for path, payload in pool.map(_run_task, tasks):
                results[path].append(payload)
    else:
        for task in tasks:
            path, payload = _run_task(task)
            results[path].append(payload)
    rows = []
    for path in spec.instance_paths:
        inst_name = parse_instance(Path(path).read_text()).name
        payloads = sorted(results[path], key=lambda p: p["seed"])
        costs = [p["best_cost"] for p in payloads]
        avg = float(np.mean(costs))
        bks = spec.bks.get(inst_name) if spec.bks is not None else None
        gap = compute_gap(avg, bks) if bks else None
        t_min = float(np.mean([p["time_to_best"] for p in payloads])) / 60.0
        rows.append(GapRow(instance=inst_name, bks=bks, avg=avg, gap=gap,
                           best=min(costs), t_min=t_min))
    return rows, results


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def rows_to_csv(rows: list[GapRow]) -> str:
    """Gap table as CSV, with the quartile summary of gaps appended as comments."""
    lines = [f"# quartiles: {QUARTILE_METHOD}", ",".join(CSV_FIELDS)]
    for row in rows:
        d = row.to_dict()
        lines.append(",".join(_fmt(d[k]) for k in CSV_FIELDS))
    gaps = [row.gap for row in rows if row.gap is not None]
    if gaps:
        s = summarize(gaps)
        lines.append("# summary " + " ".join(f"{k}={v:.4f}" for k, v in s.items()))
    return "\n".join(lines) + "\n"


def rows_to_jsonl(rows: list[GapRow]) -> str:
    """Gap table as JSON lines, ending with a summary record."""
    lines = [json.dumps({"type": "row", **row.to_dict()}, sort_keys=True) for row in rows]
    gaps = [row.gap for row in rows if row.gap is not None]
    if gaps:
        s = summarize(gaps)
        lines.append(json.dumps({"type": "summary", "quartile_method": QUARTILE_METHOD,
                                 **{k: round(v, 4) for k, v in s.items()}}, sort_keys=True))
    return "\n".join(lines) + "\n"

"""Experiment sweeps over privacy budgets and party counts."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from privebc.analysis.bounds import relative_error
from privebc.graph import Graph, PartitionedGraph, exact_ebc, partition_uniform, sample_egos
from privebc.mechanisms import BudgetTriple
from privebc.protocol import NoiseCalibration, run_private_ebc
from privebc.seeds import derive_seed

ROW_FIELDS = ["epsilon", "parties", "ego", "degree", "true_ebc", "private_ebc", "rel_error", "wall_ms"]
SUMMARY_FIELDS = ["epsilon", "parties", "median_rel_error", "median_wall_ms", "n_undefined"]


@dataclass(frozen=True)
class ExperimentSpec:
    epsilons: tuple[float, ...] = (0.1, 0.5, 1.0, 3.0, 7.0)
    parties: tuple[int, ...] = (3,)
    n_egos: int = 60
    min_degree: int = 2
    seed: int = 0
    split: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    calibration: NoiseCalibration = field(default_factory=NoiseCalibration)
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.n_egos < 1:
            raise ValueError("need at least one ego")
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if not self.parties or any(k < 1 for k in self.parties):
            raise ValueError("party counts must be >= 1")


@dataclass(frozen=True)
class Row:
    epsilon: float
    parties: int
    ego: int
    degree: int
    true_ebc: float
    private_ebc: float
    rel_error: float | None
    wall_ms: float


_GRAPHS: dict[int, PartitionedGraph] = {}


def _init_worker(graphs):
    _GRAPHS.clear()
    _GRAPHS.update(graphs)


def _run_cell(cell) -> tuple[float, float]:
    k, ego, budget, calibration, seed, timing = cell
    t0 = time.perf_counter()
    est, _ = run_private_ebc(_GRAPHS[k], ego, budget, calibration, seed=seed)
    wall = (time.perf_counter() - t0) * 1000.0 if timing else math.nan
    return est, wall


def run_sweep(graph: Graph, spec: ExperimentSpec) -> list[Row]:
    """Run the private protocol for every (epsilon, party count, ego) cell.

    Egos, partitions and per-cell seeds all derive from ``spec.seed``, so the
    rows depend only on ``(graph, spec)`` whatever ``workers`` is.
    """
    egos = sample_egos(graph, spec.n_egos, spec.seed, spec.min_degree)
    truth = {a: float(exact_ebc(graph, a)) for a in egos}
    graphs = {k: partition_uniform(graph, k, derive_seed(spec.seed, "partition"))
              for k in spec.parties}
    cells, keys = [], []
    for k in spec.parties:
        for e_idx, eps in enumerate(spec.epsilons):
            budget = BudgetTriple.split(eps, spec.split)
            for a in egos:
                seed = derive_seed(spec.seed, "run", k, e_idx, a)
                cells.append((k, a, budget, spec.calibration, seed, spec.timing))
                keys.append((eps, k, a))
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers, initializer=_init_worker, initargs=(graphs,)) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=max(1, len(cells) // (4 * spec.workers))))
    else:
        _init_worker(graphs)
        results = [_run_cell(c) for c in cells]
    rows = []
    for (eps, k, a), (est, wall) in zip(keys, results):
        rows.append(Row(eps, k, a, graph.degree(a), truth[a], est, relative_error(truth[a], est), wall))
    return rows


def summarize(rows: list[Row]) -> list[dict]:
    """Median relative error (and wall time) per (epsilon, parties)."""
    groups: dict[tuple[float, int], list[Row]] = {}
    for r in rows:
        groups.setdefault((r.epsilon, r.parties), []).append(r)
    out = []
    for (eps, k), rs in groups.items():
        errs = [r.rel_error for r in rs if r.rel_error is not None]
        walls = [r.wall_ms for r in rs if not math.isnan(r.wall_ms)]
        out.append({
            "epsilon": eps,
            "parties": k,
            "median_rel_error": float(np.median(errs)) if errs else math.nan,
            "median_wall_ms": float(np.median(walls)) if walls else math.nan,
            "n_undefined": len(rs) - len(errs),
        })
    return out


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return repr(float(v)) if isinstance(v, float) else str(v)


def rows_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in ROW_FIELDS])
    return buf.getvalue()


def summary_csv(summary: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for s in summary:
        w.writerow([_fmt(s[f]) for f in SUMMARY_FIELDS])
    return buf.getvalue()

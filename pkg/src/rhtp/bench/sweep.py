"""Monte-Carlo sweeps over sparsity and measurement count."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..algorithms import run
from ..matio import write_matrix
from .config import ExperimentConfig
from .instances import generate_instance

CSV_HEADER = ["algo", "q", "K", "m", "n", "trials", "prob_recovery", "mean_iters", "mean_final_error"]


@dataclass
class AlgoOutcome:
    recovered: bool
    iters: int
    final_error: float
    msd_curve: np.ndarray
    status: str


@dataclass
class TrialResult:
    m: int
    K: int
    trial: int
    outcomes: Dict[str, AlgoOutcome]


def trial_rng(seed: int, m: int, K: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived by seed splitting.

    The stream depends only on ``(seed, m, K, trial)``, so a trial's result is
    the same whatever other trials the sweep contains.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(m, K, trial)))


def run_trial(
    cfg: ExperimentConfig, m: int, K: int, trial: int, trace_dir=None
) -> TrialResult:
    """Draw one instance and run every algorithm on it."""
    inst = generate_instance(cfg.n, m, K, cfg.noise_std, trial_rng(cfg.seed, m, K, trial))
    outcomes = {}
    if trace_dir is not None:
        stem = os.path.join(trace_dir, f"m{m}_K{K}_t{trial}")
        write_matrix(stem + "_phi.mat", inst.phi)
        write_matrix(stem + "_y.mat", inst.y)
        write_matrix(stem + "_xstar.mat", inst.x_star)
    for spec in cfg.algorithms:
        try:
            algo = spec.build(cfg.n, K, cfg.max_iters, cfg.success_tol)
            tr = run(inst, algo)
        except Exception as exc:  # a broken run must not take the sweep down
            outcomes[spec.name] = AlgoOutcome(False, 0, math.nan, np.array([]), f"error: {exc}")
            continue
        err = tr.final.error_norm
        outcomes[spec.name] = AlgoOutcome(
            recovered=bool(err < cfg.success_tol),
            iters=tr.iterations_used,
            final_error=err,
            msd_curve=tr.msd_curve(),
            status=tr.status,
        )
        if trace_dir is not None:
            path = os.path.join(trace_dir, f"{spec.name}_m{m}_K{K}_t{trial}.jsonl")
            tr.write_jsonl(path, full=cfg.trace_full)
    return TrialResult(m, K, trial, outcomes)


def _task(args):
    cfg, m, K, trial, trace_dir = args
    return run_trial(cfg, m, K, trial, trace_dir)


@dataclass
class SweepRow:
    algo: str
    q: Optional[float]
    K: int
    m: int
    n: int
    trials: int
    recovered: int
    mean_iters: float
    mean_final_error: float
    msd_curve: np.ndarray

    @property
    def prob_recovery(self) -> float:
        return self.recovered / self.trials

    def csv_fields(self) -> List[str]:
        return [
            self.algo,
            "" if self.q is None else repr(self.q),
            str(self.K),
            str(self.m),
            str(self.n),
            str(self.trials),
            repr(self.prob_recovery),
            repr(self.mean_iters),
            repr(self.mean_final_error),
        ]

    def to_json(self) -> dict:
        def num(v):
            return v if math.isfinite(v) else None

        return {
            "algo": self.algo,
            "q": self.q,
            "K": self.K,
            "m": self.m,
            "n": self.n,
            "trials": self.trials,
            "recovered": self.recovered,
            "failures": self.trials - self.recovered,
            "prob_recovery": self.prob_recovery,
            "mean_iters": num(self.mean_iters),
            "mean_final_error": num(self.mean_final_error),
            "msd_curve": [num(float(v)) for v in self.msd_curve],
        }


def _padded_mean(curves: List[np.ndarray], length: int) -> np.ndarray:
    """Average curves of unequal length, extending each by its last value."""
    rows = []
    for c in curves:
        if c.size == 0:
            continue
        rows.append(np.concatenate([c, np.full(length - c.size, c[-1])]))
    return np.mean(rows, axis=0) if rows else np.full(length, np.nan)


def aggregate(cfg: ExperimentConfig, results: List[TrialResult]) -> List[SweepRow]:
    """Deterministic ordered reduction: rows follow ``cfg.points`` then ``cfg.algorithms``."""
    by_point: Dict[Tuple[int, int], List[TrialResult]] = {}
    for r in sorted(results, key=lambda r: (r.m, r.K, r.trial)):
        by_point.setdefault((r.m, r.K), []).append(r)
    rows = []
    for m, K in cfg.points:
        trials = by_point.get((m, K), [])
        for spec in cfg.algorithms:
            outs = [t.outcomes[spec.name] for t in trials]
            rec = [o for o in outs if o.recovered]
            errs = [o.final_error for o in outs if math.isfinite(o.final_error)]
            rows.append(
                SweepRow(
                    algo=spec.name,
                    q=spec.q,
                    K=K,
                    m=m,
                    n=cfg.n,
                    trials=len(outs),
                    recovered=len(rec),
                    mean_iters=float(np.mean([o.iters for o in rec])) if rec else math.nan,
                    mean_final_error=float(np.mean(errs)) if errs else math.nan,
                    msd_curve=_padded_mean([o.msd_curve for o in outs], cfg.max_iters + 1),
                )
            )
    return rows


def rows_to_csv(rows: List[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_fields())
    return buf.getvalue()


def _write_dat(path, xs, ys) -> None:
    with open(path, "w") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{x!r} {float(y)!r}\n")


def write_curves(cfg: ExperimentConfig, rows: List[SweepRow], out_dir) -> List[str]:
    """Two-column ``x y`` data files, one per plotted curve."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for r in rows:
        path = os.path.join(out_dir, f"msd_{r.algo}_m{r.m}_K{r.K}.dat")
        _write_dat(path, range(r.msd_curve.size), r.msd_curve)
        written.append(path)
    for spec in cfg.algorithms:
        mine = [r for r in rows if r.algo == spec.name]
        for m in cfg.m:
            pts = [r for r in mine if r.m == m]
            if len(cfg.K) > 1 and pts:
                for stat in ("prob_recovery", "mean_iters"):
                    path = os.path.join(out_dir, f"{stat}_vs_K_{spec.name}_m{m}.dat")
                    _write_dat(path, [r.K for r in pts], [getattr(r, stat) for r in pts])
                    written.append(path)
        for K in cfg.K:
            pts = [r for r in mine if r.K == K]
            if len(cfg.m) > 1 and pts:
                for stat in ("prob_recovery", "mean_iters"):
                    path = os.path.join(out_dir, f"{stat}_vs_m_{spec.name}_K{K}.dat")
                    _write_dat(path, [r.m for r in pts], [getattr(r, stat) for r in pts])
                    written.append(path)
    return written


def run_sweep(cfg: ExperimentConfig, *, write: bool = True) -> List[SweepRow]:
    """Run every trial of every sweep point and aggregate.

    With ``write`` set, ``results.csv``, ``results.json`` and ``curves/*.dat``
    are written under ``cfg.output_dir`` (plus ``traces/`` when requested).
    """
    trace_dir = None
    if write:
        os.makedirs(cfg.output_dir, exist_ok=True)
        if cfg.save_traces or cfg.trace_full:
            trace_dir = os.path.join(cfg.output_dir, "traces")
            os.makedirs(trace_dir, exist_ok=True)
    tasks = [
        (cfg, m, K, trial, trace_dir) for m, K in cfg.points for trial in range(cfg.num_trials)
    ]
    workers = cfg.effective_workers()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_task(t) for t in tasks]
    rows = aggregate(cfg, results)
    if write:
        with open(os.path.join(cfg.output_dir, "results.csv"), "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
        doc = {"config": cfg.to_dict(), "rows": [r.to_json() for r in rows]}
        with open(os.path.join(cfg.output_dir, "results.json"), "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        write_curves(cfg, rows, os.path.join(cfg.output_dir, "curves"))
    return rows


def read_results_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)

"""Experiment configuration: a single JSON document.

Keys::

    name            free-form label
    n               signal length
    m               measurement count, or a list of them (sweep)
    K               sparsity, or a list of them (sweep)
    num_trials      independent trials per sweep point
    seed            64-bit root seed
    algorithms      list of {name, algorithm, mu, regularizer}; regularizer is
                    null or {kind, q, eps, gamma}
    success_tol     a trial is recovered when ||x - x*|| < success_tol
    max_iters       iteration cap per run
    noise_std       standard deviation of the additive Gaussian noise
    output_dir      where results are written
    workers         process count (the RHTP_WORKERS variable overrides it)
    save_traces     write one JSON-lines trace per run under traces/
    trace_full      embed full iterate vectors in saved traces (implies save_traces)
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from ..algorithms import AlgoConfig, StopRule
from ..errors import ArgumentError, ConfigError
from ..regularizers import Regularizer

WORKERS_ENV = "RHTP_WORKERS"


@dataclass(frozen=True)
class AlgoSpec:
    """One competitor in a sweep; ``K`` and the stop rule come from the sweep point."""

    name: str
    algorithm: str = "rhtp"
    mu: float = 0.3
    regularizer: Optional[dict] = None

    @property
    def q(self) -> Optional[float]:
        if self.regularizer and self.regularizer.get("kind", "smooth_power") == "smooth_power":
            return float(self.regularizer["q"])
        return None

    def build(self, n: int, K: int, max_iters: int, success_tol: float) -> AlgoConfig:
        reg = None
        if self.algorithm == "rhtp":
            reg = Regularizer.from_config(self.regularizer or {"kind": "zero"}, n)
        return AlgoConfig(
            mu=self.mu,
            K=K,
            max_iters=max_iters,
            stop_rule=StopRule.error_below(success_tol),
            algorithm=self.algorithm,
            reg=reg,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "AlgoSpec":
        unknown = set(d) - {"name", "algorithm", "mu", "regularizer"}
        if unknown:
            raise ConfigError(f"unknown algorithm keys: {sorted(unknown)}")
        if "name" not in d:
            raise ConfigError("every algorithm needs a name")
        return cls(
            str(d["name"]),
            str(d.get("algorithm", "rhtp")),
            float(d.get("mu", 0.3)),
            d.get("regularizer"),
        )


def _as_list(v, key) -> List[int]:
    items = v if isinstance(v, list) else [v]
    try:
        out = [int(x) for x in items]
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer or a list of integers") from None
    if not out:
        raise ConfigError(f"{key} sweep is empty")
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    m: List[int]
    K: List[int]
    num_trials: int
    seed: int
    algorithms: List[AlgoSpec]
    success_tol: float = 1e-6
    max_iters: int = 100
    noise_std: float = 0.0
    output_dir: str = "results"
    workers: int = 1
    save_traces: bool = False
    trace_full: bool = False
    name: str = "experiment"
    support_distribution: str = field(default="uniform")

    def __post_init__(self):
        if self.num_trials < 1:
            raise ConfigError("num_trials must be at least 1")
        if not self.success_tol > 0:
            raise ConfigError("success_tol must be positive")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be nonnegative")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")
        if not self.algorithms:
            raise ConfigError("algorithms list is empty")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.support_distribution != "uniform":
            raise ConfigError("only the uniform support distribution is available")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ConfigError("algorithm names must be unique")
        for m in self.m:
            if not 1 <= m <= self.n:
                raise ConfigError(f"need 1 <= m <= n, got m={m}")
        for K in self.K:
            if K < 1:
                raise ConfigError("K must be positive")
        # reject bad regularizers now rather than in every trial
        for a in self.algorithms:
            try:
                a.build(self.n, 1, self.max_iters, self.success_tol)
            except ArgumentError as exc:
                raise ConfigError(f"algorithm {a.name!r}: {exc}") from None

    @property
    def points(self):
        """Sweep points ``(m, K)`` in output order; pairs with ``K > m`` are skipped."""
        return [(m, K) for m in self.m for K in self.K if K <= m]

    def effective_workers(self) -> int:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                w = int(env)
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer") from None
        else:
            w = self.workers
        return max(1, w)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = [asdict(a) for a in self.algorithms]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"n", "m", "K", "num_trials", "seed", "algorithms"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(
                n=int(d["n"]),
                m=_as_list(d["m"], "m"),
                K=_as_list(d["K"], "K"),
                num_trials=int(d["num_trials"]),
                seed=int(d["seed"]),
                algorithms=[AlgoSpec.from_dict(a) for a in d["algorithms"]],
                success_tol=float(d.get("success_tol", 1e-6)),
                max_iters=int(d.get("max_iters", 100)),
                noise_std=float(d.get("noise_std", 0.0)),
                output_dir=str(d.get("output_dir", "results")),
                workers=int(d.get("workers", 1)),
                save_traces=bool(d.get("save_traces", False)),
                trace_full=bool(d.get("trace_full", False)),
                name=str(d.get("name", "experiment")),
                support_distribution=str(d.get("support_distribution", "uniform")),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data)

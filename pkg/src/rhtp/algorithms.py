"""Iterative solvers: regularized HTP, plain HTP and IHT.

Every solver produces an :class:`IterationTrace` that records each iterate,
its support, the thresholded vector that selected the support, the residual
norm and (when the ground truth is known) the error norm.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ArgumentError, RHTPError
from .regularizers import Regularizer
from .sensing import (
    ProblemInstance,
    SparseIterate,
    _restricted_lstsq,
    as_support,
    hard_threshold,
)

__all__ = [
    "StopRule",
    "AlgoConfig",
    "IterationRecord",
    "IterationTrace",
    "identification_argument",
    "rhtp_step",
    "htp_step",
    "iht_step",
    "run",
]

SUPPORT_STABLE = "support_stable"
RESIDUAL_BELOW = "residual_below"
ERROR_BELOW = "error_below"

STATUS_STABLE = "converged_support_stable"
STATUS_MAX_ITERS = "hit_max_iters"
STATUS_RECOVERED = "recovered"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class StopRule:
    kind: str = SUPPORT_STABLE
    tol: float = 0.0

    def __post_init__(self):
        if self.kind not in (SUPPORT_STABLE, RESIDUAL_BELOW, ERROR_BELOW):
            raise ArgumentError(f"unknown stop rule {self.kind!r}")
        if self.kind != SUPPORT_STABLE and not self.tol > 0:
            raise ArgumentError("residual/error tolerances must be positive")

    @classmethod
    def support_stable(cls):
        return cls(SUPPORT_STABLE)

    @classmethod
    def residual_below(cls, tol):
        return cls(RESIDUAL_BELOW, tol)

    @classmethod
    def error_below(cls, tol):
        return cls(ERROR_BELOW, tol)


@dataclass(frozen=True)
class AlgoConfig:
    """Solver settings.

    ``algorithm`` is one of ``"rhtp"``, ``"htp"`` or ``"iht"``; ``reg`` is
    required for ``"rhtp"`` and ignored otherwise. ``x0`` defaults to zero.
    """

    mu: float
    K: int
    max_iters: int = 100
    stop_rule: StopRule = field(default_factory=StopRule)
    algorithm: str = "rhtp"
    reg: Optional[Regularizer] = None
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ArgumentError("mu must be positive")
        if self.max_iters < 0:
            raise ArgumentError("max_iters must be nonnegative")
        if self.K < 1:
            raise ArgumentError("K must be positive")
        if self.algorithm not in ("rhtp", "htp", "iht"):
            raise ArgumentError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == "rhtp" and self.reg is None:
            raise ArgumentError("rhtp needs a regularizer")


@dataclass
class IterationRecord:
    k: int
    x: np.ndarray
    support: np.ndarray
    x_hat: Optional[np.ndarray]
    residual_norm: float
    error_norm: Optional[float]

    def to_json(self, full: bool = False) -> str:
        rec = {
            "k": self.k,
            "support": self.support.tolist(),
            "residual": self.residual_norm,
            "error": self.error_norm,
        }
        if full:
            rec["x"] = self.x.tolist()
            rec["x_hat"] = None if self.x_hat is None else self.x_hat.tolist()
        return json.dumps(rec)

    @classmethod
    def from_json(cls, line: str, n: Optional[int] = None) -> "IterationRecord":
        rec = json.loads(line)
        support = np.asarray(rec["support"], dtype=np.int64)
        if "x" in rec:
            x = np.asarray(rec["x"], dtype=float)
        else:
            x = np.full(n or 0, np.nan)
        x_hat = rec.get("x_hat")
        return cls(
            rec["k"],
            x,
            support,
            None if x_hat is None else np.asarray(x_hat, dtype=float),
            rec["residual"],
            rec["error"],
        )


@dataclass
class IterationTrace:
    records: List[IterationRecord]
    status: str
    iterations_used: int
    message: str = ""

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    @property
    def supports(self) -> List[np.ndarray]:
        return [r.support for r in self.records]

    @property
    def iterates(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    def msd_curve(self) -> np.ndarray:
        return np.array([r.error_norm**2 for r in self.records])

    def to_jsonl(self, full: bool = False) -> str:
        return "".join(r.to_json(full) + "\n" for r in self.records)

    def write_jsonl(self, path, full: bool = False) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl(full))

    @classmethod
    def read_jsonl(cls, path) -> "IterationTrace":
        with open(path) as fh:
            records = [IterationRecord.from_json(line) for line in fh if line.strip()]
        return cls(records, "loaded", len(records) - 1)


def identification_argument(inst: ProblemInstance, mu: float, x, reg: Optional[Regularizer] = None):
    """``x + mu Phi^t (y - Phi x) - Gamma grad J(x)``, the vector that gets thresholded."""
    x = np.asarray(x, dtype=float)
    arg = x + mu * (inst.phi.T @ (inst.y - inst.phi @ x))
    if reg is not None:
        arg = arg - reg.grad_J(x)
    return arg


def rhtp_step(inst: ProblemInstance, cfg: AlgoConfig, reg: Regularizer, x_k: SparseIterate):
    """One identification + estimation step. Returns ``(x_next, x_hat, support_next)``."""
    x_hat = hard_threshold(identification_argument(inst, cfg.mu, x_k.values, reg), cfg.K)
    x_next = _restricted_lstsq(inst.phi, inst.y, x_hat.support)
    return x_next, x_hat.values, x_hat.support


def htp_step(inst: ProblemInstance, cfg: AlgoConfig, x_k: SparseIterate):
    x_hat = hard_threshold(identification_argument(inst, cfg.mu, x_k.values), cfg.K)
    x_next = _restricted_lstsq(inst.phi, inst.y, x_hat.support)
    return x_next, x_hat.values, x_hat.support


def iht_step(inst: ProblemInstance, cfg: AlgoConfig, x_k: SparseIterate) -> SparseIterate:
    """``H_K(x + mu Phi^t (y - Phi x))`` with no estimation stage."""
    return hard_threshold(identification_argument(inst, cfg.mu, x_k.values), cfg.K)


def _record(inst, k, x: SparseIterate, x_hat):
    err = None if inst.x_star is None else float(np.linalg.norm(x.values - inst.x_star))
    res = float(np.linalg.norm(inst.y - inst.phi @ x.values))
    return IterationRecord(k, x.values, x.support, x_hat, res, err)


def _initial(inst: ProblemInstance, cfg: AlgoConfig) -> SparseIterate:
    if cfg.x0 is None:
        return SparseIterate.zeros(inst.n)
    x0 = np.asarray(cfg.x0, dtype=float)
    if x0.shape != (inst.n,):
        raise ArgumentError("x0 must have length n")
    supp = as_support(np.flatnonzero(x0))
    if supp.size > cfg.K:
        raise ArgumentError("x0 has more than K nonzero entries")
    return SparseIterate(x0, supp)


def run(inst: ProblemInstance, cfg: AlgoConfig) -> IterationTrace:
    """Iterate until the stop rule fires or ``max_iters`` steps have been taken.

    Errors raised by a step end the run with status ``"failed"``; the trace up
    to that point is kept.
    """
    if cfg.stop_rule.kind == ERROR_BELOW and inst.x_star is None:
        raise ArgumentError("error_below stop rule requires x_star")
    x = _initial(inst, cfg)
    records = [_record(inst, 0, x, None)]
    rule = cfg.stop_rule
    status = STATUS_MAX_ITERS
    message = ""

    if rule.kind == ERROR_BELOW and records[0].error_norm < rule.tol:
        return IterationTrace(records, STATUS_RECOVERED, 0)
    if rule.kind == RESIDUAL_BELOW and records[0].residual_norm < rule.tol:
        return IterationTrace(records, STATUS_RECOVERED, 0)

    for k in range(cfg.max_iters):
        try:
            if cfg.algorithm == "iht":
                x_next = iht_step(inst, cfg, x)
                x_hat = x_next.values
            elif cfg.algorithm == "htp":
                x_next, x_hat, _ = htp_step(inst, cfg, x)
            else:
                x_next, x_hat, _ = rhtp_step(inst, cfg, cfg.reg, x)
        except (RHTPError, np.linalg.LinAlgError) as exc:
            status, message = STATUS_FAILED, f"{type(exc).__name__}: {exc}"
            break
        rec = _record(inst, k + 1, x_next, x_hat)
        records.append(rec)
        stable = np.array_equal(x_next.support, x.support)
        if cfg.algorithm == "iht":
            # without an estimation stage a stable support is not yet a fixed point
            stable = stable and np.array_equal(x_next.values, x.values)
        x = x_next
        if rule.kind == ERROR_BELOW and rec.error_norm < rule.tol:
            status = STATUS_RECOVERED
            break
        if rule.kind == RESIDUAL_BELOW and rec.residual_norm < rule.tol:
            status = STATUS_RECOVERED
            break
        if stable:
            # the next step would reproduce this iterate exactly, for every rule
            status = STATUS_STABLE
            break
    return IterationTrace(records, status, len(records) - 1, message)

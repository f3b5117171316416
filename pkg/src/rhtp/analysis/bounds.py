"""Closed-form magnitude bounds on ``x^k``, ``z^k`` and the thresholded vector."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Tuple

import numpy as np

from ..algorithms import IterationTrace
from ..errors import ArgumentError
from ..regularizers import PsiMap, Regularizer
from ..sensing import ProblemInstance

# (iteration, coordinate, which bound, observed value, bound value)
Violation = Tuple[int, int, str, float, float]


@dataclass
class IterateBounds:
    """Bounds indexed by iteration ``k``; per-coordinate arrays have length ``n``.

    ``E[k]`` bounds the thresholded vector produced from iterate ``k``, whose
    support is ``Lambda^{k+1}``.
    """

    B: float
    D: float
    B_k: np.ndarray
    D_k: np.ndarray
    C: np.ndarray
    E: np.ndarray
    E_global: np.ndarray
    violations: List[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _disjoint(a, b) -> bool:
    return not np.intersect1d(a, b).size


def global_E(inst: ProblemInstance, reg: Regularizer, mu: float, delta_K: float) -> np.ndarray:
    """Iteration-independent bound ``E_i = max(B C_i, D)`` on the transformed iterates."""
    if not 0 <= delta_K < 1:
        raise ArgumentError("need 0 <= delta_K < 1")
    ynorm = float(np.linalg.norm(inst.y))
    B = ynorm / math.sqrt(1.0 - delta_K)
    D = mu * float(np.max(np.linalg.norm(inst.phi, axis=0))) * ynorm
    C = 1.0 - reg.gamma * reg.g2_min_on(B)
    return np.maximum(B * C, D)


def iterate_bounds_check(
    trace: IterationTrace,
    inst: ProblemInstance,
    reg: Regularizer,
    mu: float,
    delta: Mapping[int, float],
    *,
    K: Optional[int] = None,
    noiseless: Optional[bool] = None,
    rtol: float = 1e-12,
) -> IterateBounds:
    """Evaluate every bound along ``trace`` and record each coordinate that breaks one.

    ``delta`` needs orders ``K``, ``2K`` and ``2K+1``. The sharper branches
    (factors ``delta_2K`` and ``delta_{2K+1}``) apply only to noiseless data
    and when the relevant support misses the true support. For the thresholded
    vector the branch is taken on ``Lambda^{k+1}``. Checks start at ``k = 1``;
    the thresholded vector is checked from ``k = 0``.
    """
    K = inst.K if K is None else K
    for s in (K, 2 * K, 2 * K + 1):
        if s not in delta:
            raise ArgumentError(f"missing RIC of order {s}")
    if inst.x_star is None:
        raise ArgumentError("iterate bounds need the true signal")
    noiseless = inst.noiseless if noiseless is None else noiseless
    truth = inst.true_support
    psi_map = PsiMap(reg)
    ynorm = float(np.linalg.norm(inst.y))
    B = ynorm / math.sqrt(1.0 - delta[K])
    D = mu * float(np.max(np.linalg.norm(inst.phi, axis=0))) * ynorm

    recs = trace.records
    sharp = [noiseless and _disjoint(r.support, truth) for r in recs]
    B_k = np.array([delta[2 * K] * B if s else B for s in sharp])
    D_k = np.array([delta[2 * K + 1] * D if s else D for s in sharp])
    C = np.array([1.0 - reg.gamma * reg.g2_min_on(b) for b in B_k])
    E = np.array([np.maximum(B_k[k] * C[k], D_k[k + 1]) for k in range(len(recs) - 1)])
    E = E.reshape(len(recs) - 1, inst.n)
    C_glob = 1.0 - reg.gamma * reg.g2_min_on(B)
    E_global = np.maximum(B * C_glob, D)

    out: List[Violation] = []
    checked = 0

    def over(value, bound):
        return value > bound * (1 + rtol) + rtol * ynorm

    for k, rec in enumerate(recs):
        if k >= 1:
            z = psi_map.psi(rec.x)
            for i in rec.support:
                checked += 2
                if over(abs(rec.x[i]), B_k[k]):
                    out.append((k, int(i), "x", abs(rec.x[i]), B_k[k]))
                if over(abs(z[i]), C[k][i] * B_k[k]):
                    out.append((k, int(i), "z", abs(z[i]), C[k][i] * B_k[k]))
        if k + 1 < len(recs):
            nxt = recs[k + 1]
            for i in nxt.support:
                checked += 1
                if over(abs(nxt.x_hat[i]), E[k][i]):
                    out.append((k, int(i), "x_hat", abs(nxt.x_hat[i]), E[k][i]))
    return IterateBounds(B, D, B_k, D_k, C, E, E_global, out, checked)

"""Per-iteration check of the linear contraction of ``||z^k - z*||``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..algorithms import IterationTrace
from ..regularizers import PsiMap
from ..tolerances import DEFAULTS
from .constants import AnalysisConstants


@dataclass
class ContractionReport:
    distances: np.ndarray
    bounds: np.ndarray
    ratios: np.ndarray
    violations: List[int] = field(default_factory=list)
    rho3K: float = float("nan")

    @property
    def worst_ratio(self) -> float:
        finite = self.ratios[np.isfinite(self.ratios)]
        return float(finite.max()) if finite.size else 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def contraction_check(
    trace: IterationTrace,
    z_star,
    constants: AnalysisConstants,
    psi_map: PsiMap,
    *,
    e_norm: float = 0.0,
    slack: float = DEFAULTS.contraction,
) -> ContractionReport:
    """Check ``||z^{k+1} - z*|| <= rho_3K ||z^k - z*|| + tau_2K ||e||`` for every ``k``.

    ``bounds[k]`` is the right-hand side for step ``k -> k+1``. A step
    violates the bound when it exceeds it by more than ``slack`` times the
    bound plus ``slack * ||z*||``; the absolute part absorbs round-off once
    the iterates have converged. Violations are reported as ``k + 1``.
    """
    z_star = np.asarray(z_star, dtype=float)
    zs = np.array([psi_map.psi(x) for x in trace.iterates])
    dist = np.linalg.norm(zs - z_star, axis=1)
    tau = constants.tau[2 * constants.K]
    bounds = constants.rho3K * dist[:-1] + tau * e_norm
    z_norm = float(np.linalg.norm(z_star))
    # ratios of distances already at round-off level say nothing about rho
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(dist[:-1] > 1e-9 * z_norm, dist[1:] / dist[:-1], np.nan)
    floor = slack * z_norm
    violations = [
        k + 1 for k in range(bounds.size) if dist[k + 1] > bounds[k] * (1 + slack) + floor
    ]
    return ContractionReport(dist, bounds, ratios, violations, constants.rho3K)

"""Monotone decrease of ``w(z^k) = f(x^k)`` along a trace."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..algorithms import IterationTrace
from ..regularizers import PsiMap, validate
from ..sensing import ProblemInstance
from ..tolerances import DEFAULTS
from .constants import descent_condition


@dataclass
class DescentReport:
    w: np.ndarray
    f: np.ndarray
    violations: List[int] = field(default_factory=list)
    condition_held: Optional[bool] = None
    identity_error: float = 0.0
    support_stable: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def objective(inst: ProblemInstance, x) -> float:
    r = inst.y - inst.phi @ np.asarray(x, dtype=float)
    return 0.5 * float(r @ r)


def descent_monitor(
    trace: IterationTrace,
    inst: ProblemInstance,
    psi_map: PsiMap,
    *,
    mu: Optional[float] = None,
    delta2K: Optional[float] = None,
    tol: float = DEFAULTS.descent,
) -> DescentReport:
    """Evaluate ``w`` on the transformed iterates and flag every increase.

    ``w(z^k)`` is computed the long way, as ``f(Psi^{-1}(Psi(x^k)))``, and
    compared to ``f(x^k)``. An increase counts as a violation when it exceeds
    ``tol * w(z^0)``; the index reported is ``k + 1``. With ``mu`` and
    ``delta2K`` given, the sufficient condition for descent is evaluated with
    the global curvature extremes of the regularizer.
    """
    xs = trace.iterates
    f = np.array([objective(inst, x) for x in xs])
    w = np.array([objective(inst, psi_map.psi_inv(psi_map.psi(x))) for x in xs])
    scale = max(np.max(np.abs(f)), np.finfo(float).tiny)
    identity_error = float(np.max(np.abs(w - f)) / scale) if f.size else 0.0
    slack = tol * w[0]
    violations = [k + 1 for k in range(len(w) - 1) if w[k + 1] > w[k] + slack]
    held = None
    if mu is not None and delta2K is not None:
        rep = validate(psi_map.reg)
        held = descent_condition(mu, delta2K, rep.l, rep.L)
    supports = trace.supports
    stable = len(supports) >= 2 and np.array_equal(supports[-1], supports[-2])
    return DescentReport(w, f, violations, held, identity_error, stable)

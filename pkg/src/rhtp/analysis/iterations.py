"""Upper bounds on the number of iterations needed to find the true support."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import InapplicableError
from ..sensing import nonincreasing_arrangement
from .constants import AnalysisConstants


def universal_constant(rho: float) -> float:
    """``c = ln(4/rho^2) / ln(1/rho^2)``; tends to 1 as ``rho -> 0``."""
    if not 0 <= rho < 1:
        raise InapplicableError(f"need 0 <= rho < 1, got {rho}")
    if rho == 0:
        return 1.0
    return math.log(4.0 / rho**2) / math.log(1.0 / rho**2)


def signal_dependent_bound(
    constants: AnalysisConstants, z0, z_star, e_norm: float = 0.0
) -> Optional[int]:
    """Iterations after which thresholding is guaranteed to select the true support.

    Returns ``None`` when the noise is too large for the bound to exist.
    """
    rho = constants.rho3K
    if not rho < 1:
        raise InapplicableError(f"rho_3K = {rho} >= 1")
    z0 = np.asarray(z0, dtype=float)
    z_star = np.asarray(z_star, dtype=float)
    nz = np.abs(z_star[z_star != 0])
    zmin = float(nz.min()) if nz.size else 0.0
    gap = zmin - constants.tau1 * e_norm
    if not gap > 0:
        return None
    num = math.sqrt(2.0) * constants.mu_prime[3 * constants.K] * float(np.linalg.norm(z0 - z_star))
    if num <= 0 or rho == 0:
        return 0
    return max(0, math.ceil(math.log(num / gap) / math.log(1.0 / rho)))


def universal_bound(constants: AnalysisConstants) -> int:
    """Largest integer not above ``c K``."""
    c = universal_constant(constants.rho3K)
    return math.floor(c * constants.K * (1 + 1e-12))


def predict_iterations(constants: AnalysisConstants, z0, z_star, e_norm: float = 0.0) -> dict:
    """Both iteration bounds. ``signal_dependent`` is ``None`` when unavailable."""
    if not constants.rho3K < 1:
        raise InapplicableError(f"rho_3K = {constants.rho3K} >= 1")
    return {
        "signal_dependent": signal_dependent_bound(constants, z0, z_star, e_norm),
        "universal": universal_bound(constants),
    }


def support_growth_condition(
    constants: AnalysisConstants, z_star, p: int, q: int, k_prime: int, e_norm: float = 0.0
) -> bool:
    """Sufficient condition for the ``p + q`` largest entries to be found ``k'`` steps later.

    ``r_{p+q}(z*) > rho_3K^{k'} ||(r_{p+1}, ..., r_K)|| + kappa_3K ||e||``,
    where ``r`` is the nonincreasing rearrangement of ``|z*|``.
    """
    if not constants.rho3K < 1:
        raise InapplicableError(f"rho_3K = {constants.rho3K} >= 1")
    K = constants.K
    if not (0 <= p and q >= 1 and k_prime >= 1 and p + q <= K):
        raise InapplicableError("need p >= 0, q >= 1, k' >= 1 and p + q <= K")
    r, _ = nonincreasing_arrangement(z_star)
    tail = float(np.linalg.norm(r[p:K]))
    return bool(r[p + q - 1] > constants.rho3K**k_prime * tail + constants.kappa3K * e_norm)


def first_index_with_support(trace, support) -> Optional[int]:
    """Smallest ``k`` whose iterate has exactly ``support``; ``None`` if never reached."""
    support = np.asarray(support, dtype=np.int64)
    for rec in trace.records:
        if np.array_equal(rec.support, support):
            return rec.k
    return None

"""Contraction and noise-amplification constants of the convergence analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..errors import ArgumentError
from ..regularizers import Regularizer, validate
from ..sensing import exact_ric_table

INV_SQRT3 = 1.0 / math.sqrt(3.0)


def required_orders(K: int, n: Optional[int] = None):
    orders = {1, 2, K, 2 * K, 2 * K + 1, 3 * K}
    return sorted(s for s in orders if n is None or s <= n)


@dataclass(frozen=True)
class AnalysisConstants:
    """All derived constants for one (matrix, regularizer, step size, K) choice.

    ``delta`` maps an order ``s`` to its restricted isometry constant;
    ``delta_exact`` says whether those values are exact or only estimates.
    """

    K: int
    mu: float
    l: float
    L: float
    delta: Dict[int, float]
    delta_exact: bool
    mu_prime: Dict[int, float]
    tau: Dict[int, float]
    rho3K: float
    kappa3K: float
    tau1: float
    mu_window: Tuple[float, float]
    descent_condition: bool
    flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def rho_valid(self) -> bool:
        return self.rho3K < 1

    @property
    def window_empty(self) -> bool:
        return not self.mu_window[0] < self.mu_window[1]

    @property
    def in_window(self) -> bool:
        lo, hi = self.mu_window
        return lo < self.mu < hi

    def to_json(self) -> dict:
        def num(v):
            return None if not math.isfinite(v) else v

        return {
            "K": self.K,
            "mu": self.mu,
            "l": self.l,
            "L": self.L,
            "delta": {str(k): v for k, v in self.delta.items()},
            "delta_exact": self.delta_exact,
            "mu_prime": {str(k): v for k, v in self.mu_prime.items()},
            "tau": {str(k): num(v) for k, v in self.tau.items()},
            "rho3K": num(self.rho3K),
            "kappa3K": num(self.kappa3K),
            "tau1": num(self.tau1),
            "mu_window": list(self.mu_window),
            "descent_condition": self.descent_condition,
            "flags": dict(self.flags),
        }


def mu_prime(mu: float, delta: float, l: float) -> float:
    return 1.0 - mu * (1.0 - delta) / (1.0 - l)


def rho_3s(mu_prime_3s: float, mu_prime_2s: float) -> float:
    gap = 1.0 - mu_prime_2s**2
    return math.sqrt(2.0) * mu_prime_3s / math.sqrt(gap) if gap > 0 else math.inf


def tau_s(mu: float, delta: float, mu_prime_s: float) -> float:
    gap = 1.0 - mu_prime_s**2
    if gap <= 0:
        return math.inf
    root = math.sqrt(1.0 + delta)
    return math.sqrt(2.0) * mu * root / math.sqrt(gap) + root / (1.0 - delta)


def kappa_3k(delta3K: float, mu_prime3K: float, tau3K: float, rho3K: float) -> float:
    if rho3K >= 1:
        return math.inf
    first = math.sqrt(2.0 * (1.0 + delta3K)) * (mu_prime3K + 1.0 - delta3K) / (1.0 - delta3K)
    return first + math.sqrt(2.0) * mu_prime3K * tau3K / (1.0 - rho3K)


def step_window(l: float, L: float, delta2K: float, delta3K: float) -> Tuple[float, float]:
    """Step sizes for which the iteration both descends and contracts linearly."""
    lower = (1.0 - INV_SQRT3) * (1.0 - l) / (1.0 - delta3K)
    upper = (1.0 - L) ** 2 / ((1.0 - l) * (1.0 + delta2K))
    return lower, upper


def descent_condition(mu: float, delta2K: float, l: float, L: float) -> bool:
    return mu * (1.0 + delta2K) < (1.0 - L) ** 2 / (1.0 - l)


def compute_constants(
    delta_source,
    reg: Regularizer,
    mu: float,
    K: int,
    *,
    E=None,
    delta_exact: Optional[bool] = None,
) -> AnalysisConstants:
    """Fill :class:`AnalysisConstants`.

    ``delta_source`` is either a matrix (constants are then enumerated
    exactly, so only tiny matrices are practical) or a mapping from order to
    RIC value. ``E`` restricts the curvature extremes ``l, L`` to the interval
    the iterates can reach; without it the global extremes are used.
    """
    if isinstance(delta_source, Mapping):
        delta = {int(s): float(v) for s, v in delta_source.items()}
        exact = bool(delta_exact) if delta_exact is not None else False
    else:
        phi = np.asarray(delta_source, dtype=float)
        delta = exact_ric_table(phi, required_orders(K, phi.shape[1]))
        exact = True if delta_exact is None else delta_exact
    for s in (K, 2 * K, 3 * K):
        if s not in delta:
            raise ArgumentError(f"missing RIC of order {s}")
    bad = {s: v for s, v in delta.items() if not 0 <= v < 1}
    if bad:
        raise ArgumentError(f"RIP violated: delta outside [0, 1) for orders {sorted(bad)}")
    if not mu > 0:
        raise ArgumentError("mu must be positive")

    report = validate(reg, E)
    l, L = report.l, report.L
    mp = {s: mu_prime(mu, d, l) for s, d in delta.items()}
    tau = {s: tau_s(mu, d, mp[s]) for s, d in delta.items()}
    rho = rho_3s(mp[3 * K], mp[2 * K])
    kappa = kappa_3k(delta[3 * K], mp[3 * K], tau[3 * K], rho)
    d2 = delta.get(2, delta[2 * K] if K == 1 else None)
    if d2 is None:
        raise ArgumentError("missing RIC of order 2")
    tau1 = math.sqrt(2.0 * (1.0 + d2)) * mu + (tau[2 * K] / (1.0 - rho) if rho < 1 else math.inf)
    window = step_window(l, L, delta[2 * K], delta[3 * K])
    descent = descent_condition(mu, delta[2 * K], l, L)
    flags = {
        "rho3K_lt_1": rho < 1,
        "mu_prime3K_lt_inv_sqrt3": mp[3 * K] < INV_SQRT3,
        "descent_condition": descent,
        "window_nonempty": window[0] < window[1],
        "mu_in_window": window[0] < mu < window[1],
        "delta_exact": exact,
    }
    return AnalysisConstants(
        K=K,
        mu=mu,
        l=l,
        L=L,
        delta=delta,
        delta_exact=exact,
        mu_prime=mp,
        tau=tau,
        rho3K=rho,
        kappa3K=kappa,
        tau1=tau1,
        mu_window=window,
        descent_condition=descent,
        flags=flags,
    )

"""Dense linear-algebra substrate for sparse recovery.

Problem instances, the hard thresholding operator, least squares restricted
to a support, orthogonal projections onto column spans, the nonincreasing
rearrangement of a vector and restricted isometry constants.

Supports are represented as strictly increasing ``int64`` numpy arrays of
0-based column indices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import ArgumentError, BudgetError, SingularityError
from .tolerances import DEFAULTS

__all__ = [
    "ProblemInstance",
    "SparseIterate",
    "RICEstimate",
    "as_support",
    "hard_threshold",
    "restricted_least_squares",
    "projection_onto_span",
    "nonincreasing_arrangement",
    "estimate_ric",
    "ric_estimate",
    "exact_ric_table",
]

EXACT_RIC_BUDGET = 10**6


def as_support(indices, n: Optional[int] = None) -> np.ndarray:
    """Validate ``indices`` as a support set and return it as an int64 array."""
    supp = np.asarray(indices, dtype=np.int64).reshape(-1)
    if supp.size > 1 and np.any(np.diff(supp) <= 0):
        raise ArgumentError("support indices must be strictly increasing")
    if supp.size and (supp[0] < 0 or (n is not None and supp[-1] >= n)):
        raise ArgumentError(f"support indices out of range [0, {n})")
    return supp


@dataclass(frozen=True)
class SparseIterate:
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        mask = np.ones(self.values.shape[0], dtype=bool)
        mask[self.support] = False
        if np.any(self.values[mask] != 0):
            raise ArgumentError("values are nonzero outside the declared support")

    @classmethod
    def zeros(cls, n: int) -> "SparseIterate":
        return cls(np.zeros(n), np.zeros(0, dtype=np.int64))


@dataclass(frozen=True)
class ProblemInstance:
    """Measurement model ``y = phi @ x_star + e`` with sparsity level ``K``."""

    phi: np.ndarray
    y: np.ndarray
    K: int
    x_star: Optional[np.ndarray] = None
    e: Optional[np.ndarray] = None

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "y", y)
        if phi.ndim != 2:
            raise ArgumentError("phi must be a matrix")
        m, n = phi.shape
        if y.shape != (m,):
            raise ArgumentError(f"y must have shape ({m},), got {y.shape}")
        if m > n:
            raise ArgumentError(f"need m <= n, got m={m}, n={n}")
        if not 1 <= self.K <= m:
            raise ArgumentError(f"need 1 <= K <= m, got K={self.K}")
        if self.x_star is not None:
            x = np.asarray(self.x_star, dtype=float)
            object.__setattr__(self, "x_star", x)
            if x.shape != (n,):
                raise ArgumentError("x_star must have length n")
            if np.count_nonzero(x) > self.K:
                raise ArgumentError("x_star has more than K nonzero entries")
        if self.e is not None:
            e = np.asarray(self.e, dtype=float)
            object.__setattr__(self, "e", e)
            if e.shape != (m,):
                raise ArgumentError("e must have length m")
        if self.x_star is not None and self.e is not None:
            scale = 1.0 + np.abs(phi) @ np.abs(self.x_star) + np.abs(self.e)
            gap = np.abs(y - (phi @ self.x_star + self.e))
            if np.any(gap > DEFAULTS.consistency * scale):
                raise ArgumentError("y is inconsistent with phi @ x_star + e")

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    @property
    def true_support(self) -> Optional[np.ndarray]:
        if self.x_star is None:
            return None
        return np.flatnonzero(self.x_star).astype(np.int64)

    @property
    def noiseless(self) -> bool:
        return self.e is None or not np.any(self.e)


def hard_threshold(v, K: int) -> SparseIterate:
    """Keep the ``K`` largest-magnitude entries of ``v``; ties go to the lower index."""
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    if not 1 <= K <= n:
        raise ArgumentError(f"need 1 <= K <= n, got K={K}, n={n}")
    order = np.argsort(-np.abs(v), kind="stable")
    support = np.sort(order[:K]).astype(np.int64)
    values = np.zeros_like(v)
    values[support] = v[support]
    return SparseIterate(values, support)


def _orthogonal_factor(phi_s: np.ndarray, limit: float):
    q, r = np.linalg.qr(phi_s)
    diag = np.abs(np.diag(r))
    if diag.size and (diag.min() == 0 or np.linalg.cond(r) > limit):
        raise SingularityError(
            f"restricted submatrix is rank deficient (condition estimate above {limit:g})"
        )
    return q, r


def restricted_least_squares(
    inst: ProblemInstance, support, *, condition_limit: float = DEFAULTS.condition_limit
) -> SparseIterate:
    """Minimize ``||y - phi z||_2`` over vectors ``z`` supported on ``support``.

    Solved through a thin QR factorization of the column submatrix.
    """
    return _restricted_lstsq(inst.phi, inst.y, as_support(support, inst.n), condition_limit)


def _restricted_lstsq(phi, y, support, condition_limit=DEFAULTS.condition_limit):
    z = np.zeros(phi.shape[1])
    if support.size:
        q, r = _orthogonal_factor(phi[:, support], condition_limit)
        z[support] = scipy.linalg.solve_triangular(r, q.T @ y)
    return SparseIterate(z, support)


def projection_onto_span(
    phi, support, v, *, condition_limit: float = DEFAULTS.condition_limit
) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the span of the columns ``phi[:, support]``."""
    phi = np.asarray(phi, dtype=float)
    v = np.asarray(v, dtype=float)
    support = as_support(support, phi.shape[1])
    if not support.size:
        return np.zeros_like(v)
    q, _ = _orthogonal_factor(phi[:, support], condition_limit)
    return q @ (q.T @ v)


def nonincreasing_arrangement(v):
    """Return ``(r, pi)`` with ``r = |v|[pi]`` sorted nonincreasingly, ties by lower index."""
    a = np.abs(np.asarray(v, dtype=float))
    pi = np.argsort(-a, kind="stable")
    return a[pi], pi


@dataclass(frozen=True)
class RICEstimate:
    """A restricted isometry constant together with how it was obtained.

    ``exact`` is False for randomized estimates, which are lower bounds.
    """

    order: int
    value: float
    exact: bool
    supports_checked: int


def _support_deviation(phi, supports: np.ndarray) -> float:
    gram_full = phi.T @ phi
    worst = 0.0
    for chunk in np.array_split(supports, max(1, supports.shape[0] // 20000)):
        gram = gram_full[chunk[:, :, None], chunk[:, None, :]]     # (c, s, s)
        eig = np.linalg.eigvalsh(gram)
        worst = max(worst, float(np.max(eig[:, -1] - 1.0)), float(np.max(1.0 - eig[:, 0])))
    return worst


def ric_estimate(
    phi,
    s: int,
    mode: str = "exact",
    *,
    num_samples: int = 10000,
    rng: Optional[np.random.Generator] = None,
    budget: int = EXACT_RIC_BUDGET,
) -> RICEstimate:
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[1]
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}")
    if mode == "exact":
        count = math.comb(n, s)
        if count > budget:
            raise BudgetError(f"C({n}, {s}) = {count} supports exceeds the budget of {budget}")
        supports = np.array(list(itertools.combinations(range(n), s)), dtype=np.int64)
        return RICEstimate(s, _support_deviation(phi, supports), True, count)
    if mode == "randomized":
        if rng is None:
            raise ArgumentError("randomized mode needs an explicit rng")
        supports = np.sort(
            np.array([rng.choice(n, s, replace=False) for _ in range(num_samples)]), axis=1
        )
        return RICEstimate(s, _support_deviation(phi, supports), False, num_samples)
    raise ArgumentError(f"unknown mode {mode!r}")


def estimate_ric(phi, s: int, mode: str = "exact", **kwargs) -> float:
    """Restricted isometry constant of order ``s``.

    ``exact`` enumerates all C(n, s) supports; ``randomized`` samples supports
    and returns a lower bound. See :func:`ric_estimate` for the full record.
    """
    return ric_estimate(phi, s, mode, **kwargs).value


def exact_ric_table(phi, orders) -> dict:
    """Exact constants for several orders, keyed by order."""
    n = np.asarray(phi).shape[1]
    return {s: estimate_ric(phi, s) for s in sorted(set(orders)) if 1 <= s <= n}

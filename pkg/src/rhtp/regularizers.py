"""Decomposable regularizers and the coordinate maps they induce.

A regularizer is ``J(x) = sum_j gamma_j g(x_j)``. Two families are supported:
``zero`` (g = 0, which turns RHTP into HTP) and ``smooth_power`` with
``g(x) = (x**2 + eps**2) ** (q / 2)``.

Each coordinate map ``psi_j(x) = x - gamma_j g'(x)`` is strictly increasing
whenever ``gamma_j * g'' < 1`` everywhere, which the constructor enforces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, InternalError, InvalidRegularizerError
from .tolerances import DEFAULTS

__all__ = [
    "Regularizer",
    "PsiMap",
    "ValidityReport",
    "g_value",
    "g_prime",
    "g_prime2",
    "validate",
    "DEFAULT_EPS",
    "DEFAULT_GAMMA",
]

DEFAULT_GAMMA = 0.3
DEFAULT_EPS = 1.4 * DEFAULT_GAMMA

_MAX_DOUBLINGS = 200
_MAX_ROOT_ITERS = 300


@dataclass(frozen=True, eq=False)
class Regularizer:
    """Per-coordinate weights ``gamma`` and a shared scalar function ``g``."""

    kind: str
    gamma: np.ndarray
    q: float = 0.0
    eps: float = 0.0
    margin: float = field(default=DEFAULTS.validity_margin, repr=False)

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float).reshape(-1)
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
            raise ArgumentError("gamma must be finite and nonnegative")
        if self.kind == "zero":
            object.__setattr__(self, "gamma", np.zeros_like(gamma))
            return
        if self.kind != "smooth_power":
            raise ArgumentError(f"unknown regularizer kind {self.kind!r}")
        if not (self.q > 0 and self.eps > 0):
            raise InvalidRegularizerError("smooth_power needs q > 0 and eps > 0")
        if self.q > 2:
            raise InvalidRegularizerError(f"g'' is unbounded for q={self.q} > 2")
        worst = float(gamma.max(initial=0.0)) * self.sup_g2
        if worst >= 1 - self.margin:
            raise InvalidRegularizerError(
                f"gamma * sup g'' = {worst:.6g} violates gamma * g'' < 1"
            )
        # numerical cross-check of the closed-form supremum
        grid = np.concatenate([np.linspace(-50, 50, 4001) * self.eps, [0.0], self._g2_critical()])
        if float(gamma.max(initial=0.0)) * float(np.max(self._g2(grid))) >= 1 - self.margin:
            raise InvalidRegularizerError("gamma * g'' reaches 1 on the validation grid")

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Regularizer":
        return cls("zero", np.zeros(n))

    @classmethod
    def smooth_power(cls, q: float, eps: float, gamma, n: Optional[int] = None) -> "Regularizer":
        gamma = np.asarray(gamma, dtype=float)
        if gamma.ndim == 0:
            if n is None:
                raise ArgumentError("a scalar gamma needs the dimension n")
            gamma = np.full(n, float(gamma))
        return cls("smooth_power", gamma, float(q), float(eps))

    @classmethod
    def standard(cls, q: float, n: int) -> "Regularizer":
        """Default smooth power regularizer, gamma = 0.3 and eps = 1.4 * gamma."""
        return cls.smooth_power(q, DEFAULT_EPS, DEFAULT_GAMMA, n)

    @classmethod
    def from_config(cls, cfg: dict, n: int) -> "Regularizer":
        kind = cfg.get("kind")
        if kind == "zero":
            return cls.zero(n)
        if kind == "smooth_power":
            missing = {"q", "eps", "gamma"} - set(cfg)
            if missing:
                raise ArgumentError(f"smooth_power regularizer is missing {sorted(missing)}")
            return cls.smooth_power(cfg["q"], cfg["eps"], cfg["gamma"], n)
        raise ArgumentError(f"unknown regularizer kind {kind!r}")

    def to_config(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        gamma = self.gamma
        g = float(gamma[0]) if gamma.size and np.all(gamma == gamma[0]) else gamma.tolist()
        return {"kind": "smooth_power", "q": self.q, "eps": self.eps, "gamma": g}

    # scalar function g and derivatives (vectorised) ---------------------

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or not np.any(self.gamma)

    def _g(self, x):
        if self.kind == "zero":
            return np.zeros_like(x, dtype=float)
        return (x * x + self.eps**2) ** (self.q / 2)

    def _g1(self, x):
        if self.kind == "zero":
            return np.zeros_like(x, dtype=float)
        return self.q * x * (x * x + self.eps**2) ** (self.q / 2 - 1)

    def _g2(self, x):
        if self.kind == "zero":
            return np.zeros_like(x, dtype=float)
        s = x * x
        e2 = self.eps**2
        return self.q * (s + e2) ** (self.q / 2 - 2) * ((self.q - 1) * s + e2)

    def _g2_critical(self) -> np.ndarray:
        """Nonzero stationary points of g''; only q < 1 has them."""
        if self.kind == "zero" or self.q >= 1:
            return np.zeros(0)
        x = self.eps * math.sqrt(3.0 / (1.0 - self.q))
        return np.array([-x, x])

    @property
    def sup_g2(self) -> float:
        """sup over the real line of g''; attained at 0 for every q <= 2."""
        if self.kind == "zero":
            return 0.0
        return self.q * self.eps ** (self.q - 2)

    def g2_min_on(self, a) -> np.ndarray:
        """min of g'' over ``[-a, a]`` (``a`` may be ``inf``), elementwise in ``a``."""
        a = np.abs(np.asarray(a, dtype=float))
        if self.kind == "zero":
            return np.zeros_like(a)
        if self.q == 2:
            return np.full_like(a, 2.0)
        crit = self._g2_critical()
        if crit.size:
            # g'' decreases in |x| up to the critical point, then rises towards 0
            return self._g2(np.minimum(a, crit[1]))
        # 1 <= q < 2: g'' decreases in |x| and tends to 0
        with np.errstate(invalid="ignore"):
            out = self._g2(a)
        return np.where(np.isinf(a), 0.0, out)

    def g2_max_on(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return np.full_like(a, self.sup_g2)

    @property
    def sup_abs_g1(self) -> float:
        """sup |g'| over the real line (``inf`` for 1 < q <= 2)."""
        if self.kind == "zero":
            return 0.0
        if self.q > 1:
            return math.inf
        if self.q == 1:
            return 1.0
        x = self.eps / math.sqrt(1.0 - self.q)
        return float(abs(self._g1(x)))

    def grad_J(self, x) -> np.ndarray:
        """``Gamma @ grad J(x)``, i.e. ``gamma_j g'(x_j)`` per coordinate."""
        return self.gamma * self._g1(np.asarray(x, dtype=float))

    def J(self, x) -> float:
        return float(np.sum(self.gamma * self._g(np.asarray(x, dtype=float))))


def g_value(reg: Regularizer, j: int, x):
    return reg._g(np.asarray(x, dtype=float))


def g_prime(reg: Regularizer, j: int, x):
    return reg._g1(np.asarray(x, dtype=float))


def g_prime2(reg: Regularizer, j: int, x):
    return reg._g2(np.asarray(x, dtype=float))


class PsiMap:
    """The coordinatewise homeomorphism ``Psi`` and its inverse.

    Vector methods take length-``n`` arrays. Passing ``j`` evaluates the single
    coordinate map ``psi_j`` on scalars or arrays.
    """

    def __init__(self, reg: Regularizer, tol: float = DEFAULTS.psi_inverse):
        self.reg = reg
        self.tol = tol
        if not reg.is_zero:
            grid = np.linspace(-20, 20, 2001) * max(reg.eps, 1.0)
            steps = np.diff(self.psi(grid, j=int(np.argmax(reg.gamma))))
            if np.any(steps <= 0):
                raise InvalidRegularizerError("psi is not strictly increasing on the check grid")

    def _gamma(self, j):
        return self.reg.gamma if j is None else self.reg.gamma[j]

    def psi(self, x, j: Optional[int] = None):
        x = np.asarray(x, dtype=float)
        return x - self._gamma(j) * self.reg._g1(x)

    def psi_prime(self, x, j: Optional[int] = None):
        x = np.asarray(x, dtype=float)
        return 1.0 - self._gamma(j) * self.reg._g2(x)

    def psi_inv(self, y, j: Optional[int] = None, tol: Optional[float] = None):
        tol = self.tol if tol is None else tol
        if not tol > 0:
            raise ArgumentError("tol must be positive")
        y = np.asarray(y, dtype=float)
        gamma = np.broadcast_to(self._gamma(j), y.shape)
        return _invert(self.reg, y, gamma, tol)

    def m_diagonal(self, z, support=None) -> np.ndarray:
        """Diagonal of ``M(z)``: ``1 - gamma_i g''(psi_i^{-1}(z_i))``, restricted to ``support``."""
        z = np.asarray(z, dtype=float)
        idx = np.arange(z.shape[0]) if support is None else np.asarray(support, dtype=np.int64)
        x = _invert(self.reg, z[idx], self.reg.gamma[idx], self.tol)
        return 1.0 - self.reg.gamma[idx] * self.reg._g2(x)


def _invert(reg: Regularizer, y: np.ndarray, gamma: np.ndarray, tol: float) -> np.ndarray:
    """Solve ``x - gamma g'(x) = y`` elementwise by bracketing and safeguarded Newton."""
    y = np.asarray(y, dtype=float)
    out = y.copy()
    active = (gamma > 0) & (y != 0)
    if reg.kind == "zero" or not np.any(active):
        return out
    ya, ga = y[active], gamma[active]

    def resid(x):
        return x - ga * reg._g1(x) - ya

    c = ga * reg.sup_abs_g1
    c = np.where(np.isfinite(c), c, ga * np.abs(reg._g1(ya)))
    c = np.maximum(c, np.abs(ya) * 1e-15 + 1e-300)
    lo, hi = ya - c, ya + c
    for _ in range(_MAX_DOUBLINGS):
        bad = (resid(lo) > 0) | (resid(hi) < 0)
        if not np.any(bad):
            break
        c = np.where(bad, 2 * c, c)
        lo, hi = ya - c, ya + c
    else:
        raise InternalError("psi inverse: no sign change after 200 bracket doublings")

    x = np.clip(ya + ga * reg._g1(ya), lo, hi)
    done = np.zeros(ya.shape, dtype=bool)
    for _ in range(_MAX_ROOT_ITERS):
        r = resid(x)
        done |= np.abs(r) <= tol
        done |= (hi - lo) <= 4 * np.finfo(float).eps * np.maximum(np.abs(x), 1e-300)
        if np.all(done):
            break
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        step = x - r / (1.0 - ga * reg._g2(x))
        inside = (step > lo) & (step < hi)
        nxt = np.where(inside, step, 0.5 * (lo + hi))
        x = np.where(done, x, nxt)
    else:
        raise InternalError("psi inverse did not converge")
    out[active] = x
    return out


@dataclass(frozen=True)
class ValidityReport:
    """Extremes of ``gamma_i g''`` over the interval used by the convergence analysis.

    ``l`` and ``L`` are the smallest and largest values of ``gamma_i g''(u)``
    for ``|u| <= u_bound[i]``; ``u_bound`` is ``inf`` for the global extremes.
    """

    l: float
    L: float
    u_bound: np.ndarray
    valid: bool


def validate(reg: Regularizer, E=None, *, u_bound=None) -> ValidityReport:
    """Closed-form ``l`` and ``L`` for the regularizer.

    ``E`` bounds the transformed iterates: the interval is
    ``[psi^{-1}(-E_i), psi^{-1}(E_i)]``. Alternatively ``u_bound`` gives the
    half-width of the interval in the original domain directly. With neither,
    the extremes are taken over the whole real line.
    """
    n = reg.n
    if u_bound is not None:
        a = np.broadcast_to(np.abs(np.asarray(u_bound, dtype=float)), (n,)).copy()
    elif E is not None:
        E = np.broadcast_to(np.abs(np.asarray(E, dtype=float)), (n,))
        a = np.abs(PsiMap(reg).psi_inv(E))
    else:
        a = np.full(n, np.inf)
    if reg.kind == "zero":
        return ValidityReport(0.0, 0.0, a, True)
    lows = reg.gamma * reg.g2_min_on(a)
    highs = reg.gamma * reg.g2_max_on(a)
    l, L = float(lows.min()), float(highs.max())
    if L >= 1:
        raise InvalidRegularizerError(f"L = {L:.6g} >= 1")
    return ValidityReport(l, L, a, True)

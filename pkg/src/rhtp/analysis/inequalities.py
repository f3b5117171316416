"""Checkers for the auxiliary inequalities used by the convergence analysis.

Each checker returns the two sides of its inequality so callers can look at
the margin, not just a boolean.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..errors import ArgumentError, PreconditionError
from ..regularizers import PsiMap, Regularizer, validate
from ..sensing import as_support, projection_onto_span
from ..tolerances import DEFAULTS


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ok: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _check(lhs, rhs, rtol, atol=0.0) -> InequalityCheck:
    lhs, rhs = float(lhs), float(rhs)
    return InequalityCheck(lhs, rhs, lhs <= rhs * (1 + rtol) + atol)


def wielandt_check(B, x, y, *, rtol: float = DEFAULTS.wielandt) -> InequalityCheck:
    """``|x'By|^2 <= ((lM - lm)/(lM + lm))^2 (x'Bx)(y'By)`` for orthogonal ``x, y``."""
    B = np.asarray(B, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.allclose(B, B.T, rtol=0, atol=1e-12 * max(1.0, np.abs(B).max())):
        raise ArgumentError("B must be symmetric")
    eig = np.linalg.eigvalsh(B)
    if eig[0] <= 0:
        raise PreconditionError("B is not positive definite")
    scale = np.linalg.norm(x) * np.linalg.norm(y)
    if abs(x @ y) > DEFAULTS.orthogonality * max(scale, 1e-300):
        raise PreconditionError("x and y are not orthogonal")
    ratio = (eig[-1] - eig[0]) / (eig[-1] + eig[0])
    lhs = (x @ B @ y) ** 2
    rhs = ratio**2 * (x @ B @ x) * (y @ B @ y)
    return _check(lhs, rhs, rtol, rtol * eig[-1] ** 2 * scale**2)


def wielandt_extremal_pair(B):
    """An orthonormal pair that attains equality in the Wielandt inequality."""
    _, vecs = np.linalg.eigh(np.asarray(B, dtype=float))
    lo, hi = vecs[:, 0], vecs[:, -1]
    return (hi + lo) / np.sqrt(2.0), (hi - lo) / np.sqrt(2.0)


def _disjoint_supports(S, Lam, n):
    S = as_support(S, n)
    Lam = as_support(Lam, n)
    if np.intersect1d(S, Lam).size:
        raise PreconditionError("S and Lambda must be disjoint")
    return S, Lam


def projection_bound_check(phi, S, Lam, x_lam, delta: float, *, rtol=1e-12) -> InequalityCheck:
    """``||P_S y|| <= delta_{|S|+|Lambda|} ||y||`` for ``y = phi_Lambda x_Lambda``, S and Lambda disjoint."""
    phi = np.asarray(phi, dtype=float)
    S, Lam = _disjoint_supports(S, Lam, phi.shape[1])
    y = phi[:, Lam] @ np.asarray(x_lam, dtype=float)
    lhs = np.linalg.norm(projection_onto_span(phi, S, y))
    ynorm = np.linalg.norm(y)
    return _check(lhs, delta * ynorm, rtol, rtol * ynorm)


def inner_product_bound_check(
    phi, S, Lam, x_lam, i: int, delta: float, *, rtol=1e-12
) -> InequalityCheck:
    """``|phi_i' P_S^perp y| <= delta_{|S|+|Lambda|+1} ||P_S^perp phi_i|| ||y||`` for ``i`` outside S and Lambda."""
    phi = np.asarray(phi, dtype=float)
    S, Lam = _disjoint_supports(S, Lam, phi.shape[1])
    if i in S or i in Lam:
        raise PreconditionError("i must lie outside S and Lambda")
    y = phi[:, Lam] @ np.asarray(x_lam, dtype=float)
    y_perp = y - projection_onto_span(phi, S, y)
    col = phi[:, i]
    col_perp = col - projection_onto_span(phi, S, col)
    ynorm = np.linalg.norm(y)
    rhs = delta * np.linalg.norm(col_perp) * ynorm
    return _check(abs(col @ y_perp), rhs, rtol, rtol * np.linalg.norm(col) * ynorm)


@dataclass(frozen=True)
class DInequalityResult:
    inner: InequalityCheck
    norm: InequalityCheck
    rho_prime: float

    @property
    def rho_prime_in_unit(self) -> bool:
        return 0 < self.rho_prime < 1

    @property
    def ok(self) -> bool:
        return self.inner.ok and self.norm.ok and self.rho_prime_in_unit


def d_map(u, v, rho: float, phi, psi_map: PsiMap) -> np.ndarray:
    """``d(u, v) = v - u - rho Phi' Phi (Psi^{-1}(v) - Psi^{-1}(u))``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    diff = psi_map.psi_inv(v) - psi_map.psi_inv(u)
    return v - u - rho * (phi.T @ (phi @ diff))


def d_inequality_check(
    u,
    v,
    w,
    rho: float,
    phi,
    reg: Regularizer,
    delta: Mapping[int, float],
    *,
    E=None,
    rtol: float = 1e-10,
    psi_map: Optional[PsiMap] = None,
) -> DInequalityResult:
    """Both inequalities for ``d(u, v)`` with ``rho' = 1 - rho (1 - delta_|T|)/(1 - l)``.

    ``T`` is the union of the supports of ``u``, ``v`` and ``w``; ``delta``
    must contain order ``|T|``. ``E`` (scalar or per coordinate) bounds the
    entries of ``u`` and ``v`` and fixes the interval for ``l, L``; when
    omitted the global curvature extremes are used and no magnitude
    hypothesis is imposed. The second inequality is evaluated on the support
    of ``w``.

    Raises :class:`PreconditionError` when a hypothesis fails, since the
    inequalities promise nothing in that case.
    """
    phi = np.asarray(phi, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    T = np.flatnonzero((u != 0) | (v != 0) | (w != 0))
    if T.size and T.size not in delta:
        raise ArgumentError(f"missing RIC of order {T.size}")
    dT = float(delta[T.size]) if T.size else 0.0
    if not 0 <= dT < 1:
        raise PreconditionError(f"no RIP of order {T.size}")
    if E is not None:
        Eb = np.broadcast_to(np.abs(np.asarray(E, dtype=float)), u.shape)
        if np.any(np.abs(u) > Eb) or np.any(np.abs(v) > Eb):
            raise PreconditionError("|u_i| or |v_i| exceeds E")
    rep = validate(reg, E)
    l, L = rep.l, rep.L
    if not rho * (1 + dT) < (1 - L) ** 2 / (1 - l):
        raise PreconditionError("rho (1 + delta_|T|) < (1 - L)^2 / (1 - l) fails")
    rho_prime = 1.0 - rho * (1.0 - dT) / (1.0 - l)

    pm = psi_map if psi_map is not None else PsiMap(reg)
    d = d_map(u, v, rho, phi, pm)
    step = float(np.linalg.norm(v - u))
    scale = step * float(np.linalg.norm(w))
    inner = _check(w @ d, rho_prime * scale, rtol, rtol * scale)
    T3 = np.flatnonzero(w)
    norm = _check(np.linalg.norm(d[T3]), rho_prime * step, rtol, rtol * step)
    return DInequalityResult(inner, norm, rho_prime)

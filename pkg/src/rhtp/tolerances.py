"""Numerical tolerances used across the library.

The defaults are roughly 100x the double-precision accumulation error for
problems with m, n <= 1024. Pass a modified copy where an operation accepts a
``tol`` argument, or use :func:`dataclasses.replace` on :data:`DEFAULTS`.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    orthogonality: float = 1e-10
    wielandt: float = 1e-12
    consistency: float = 1e-12
    psi_inverse: float = 1e-12
    condition_limit: float = 1e12
    descent: float = 1e-12
    contraction: float = 1e-10
    validity_margin: float = 1e-9


DEFAULTS = Tolerances()

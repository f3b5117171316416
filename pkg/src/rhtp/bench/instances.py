"""Random problem ensembles."""
from __future__ import annotations

import numpy as np

from ..errors import ArgumentError
from ..sensing import ProblemInstance


def _signal(n: int, K: int, rng: np.random.Generator) -> np.ndarray:
    # support uniform over size-K subsets, values i.i.d. N(0, 1)
    support = np.sort(rng.choice(n, size=K, replace=False))
    x = np.zeros(n)
    x[support] = rng.standard_normal(K)
    return x


def _measure(phi, x, K, noise_std, rng) -> ProblemInstance:
    m = phi.shape[0]
    if noise_std > 0:
        e = noise_std * rng.standard_normal(m)
    else:
        e = np.zeros(m)
    return ProblemInstance(phi, phi @ x + e, K, x_star=x, e=e)


def generate_instance(
    n: int, m: int, K: int, noise_std: float, rng: np.random.Generator
) -> ProblemInstance:
    """Gaussian ensemble: ``phi_ij ~ N(0, 1/m)``, uniform support, N(0, 1) nonzeros.

    Draw order is fixed (matrix, support, values, noise) so a given generator
    state always yields the same instance.
    """
    if not (1 <= K <= m <= n):
        raise ArgumentError(f"need 1 <= K <= m <= n, got n={n}, m={m}, K={K}")
    if noise_std < 0:
        raise ArgumentError("noise_std must be nonnegative")
    phi = rng.standard_normal((m, n)) / np.sqrt(m)
    x = _signal(n, K, rng)
    return _measure(phi, x, K, noise_std, rng)


def simplex_frame(n: int) -> np.ndarray:
    """``n`` unit vectors in ``R^{n-1}`` with all pairwise inner products ``-1/(n-1)``."""
    if n < 2:
        raise ArgumentError("need n >= 2")
    centered = np.eye(n) - 1.0 / n
    # orthonormal basis of the complement of the all-ones vector
    q, _ = np.linalg.qr(centered[:, : n - 1])
    frame = q.T @ centered
    return frame / np.linalg.norm(frame, axis=0)


def near_isometric_instance(
    n: int,
    K: int,
    noise_std: float,
    rng: np.random.Generator,
    *,
    perturbation: float = 0.02,
) -> ProblemInstance:
    """Tiny instance with ``m = n - 1`` and small restricted isometry constants.

    The matrix is a randomly rotated simplex frame with random column signs
    and a small Gaussian perturbation. Such frames keep low-order constants
    well below one, so the convergence hypotheses can actually be met; a
    Gaussian matrix of comparable size almost never meets them.
    """
    m = n - 1
    if not 1 <= K <= m:
        raise ArgumentError(f"need 1 <= K <= {m}")
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    signs = rng.choice([-1.0, 1.0], size=n)
    phi = q @ simplex_frame(n) * signs
    phi = phi + perturbation * rng.standard_normal((m, n)) / np.sqrt(m)
    x = _signal(n, K, rng)
    return _measure(phi, x, K, noise_std, rng)

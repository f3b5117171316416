"""The transformed iterates ``z^k = Psi(x^k)`` and an independent z-domain simulation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from ..algorithms import AlgoConfig, IterationTrace
from ..regularizers import PsiMap
from ..sensing import ProblemInstance, _restricted_lstsq, hard_threshold


@dataclass
class ConjugateTrace:
    """``mapped[k] = Psi(x^k)``; ``simulated[k]`` comes from iterating the z-domain map."""

    mapped: np.ndarray
    simulated: np.ndarray
    mapped_supports: List[np.ndarray]
    simulated_supports: List[np.ndarray]

    @property
    def deviation(self) -> np.ndarray:
        """Per-iteration sup-norm gap between the two sequences."""
        if self.mapped.size == 0:
            return np.zeros(self.mapped.shape[0])
        return np.max(np.abs(self.mapped - self.simulated), axis=1)

    @property
    def supports_agree(self) -> bool:
        return all(
            np.array_equal(a, b) for a, b in zip(self.mapped_supports, self.simulated_supports)
        )


def grad_w(inst: ProblemInstance, psi_map: PsiMap, z) -> np.ndarray:
    """Gradient of ``w = f o Psi^{-1}``: ``M(z)^{-1} grad f(Psi^{-1}(z))``."""
    x = psi_map.psi_inv(z)
    grad_f = -(inst.phi.T @ (inst.y - inst.phi @ x))
    return grad_f / psi_map.m_diagonal(z)


def z_step(inst: ProblemInstance, psi_map: PsiMap, mu: float, K: int, z):
    """One step of the z-domain dynamics.

    Threshold ``z - mu M(z) grad w(z)``, then minimize ``w`` over the selected
    support. The minimizer is the image under ``Psi`` of the ordinary least
    squares solution on that support, since ``Psi`` preserves supports.
    """
    m_diag = psi_map.m_diagonal(z)
    arg = z - mu * m_diag * grad_w(inst, psi_map, z)
    support = hard_threshold(arg, K).support
    x = _restricted_lstsq(inst.phi, inst.y, support).values
    return psi_map.psi(x), support


def conjugate_trace(
    trace: IterationTrace, psi_map: PsiMap, inst: ProblemInstance, cfg: AlgoConfig
) -> ConjugateTrace:
    """Map a completed RHTP trace through ``Psi`` and rerun it in the z-domain.

    The simulation starts from ``Psi(x^0)`` and takes as many steps as the
    trace, so the two sequences can be compared entry by entry.
    """
    xs = trace.iterates
    mapped = np.array([psi_map.psi(x) for x in xs])
    mapped_supports = [r.support for r in trace.records]
    sim = [mapped[0]]
    sim_supports = [mapped_supports[0]]
    for _ in range(len(xs) - 1):
        z, support = z_step(inst, psi_map, cfg.mu, cfg.K, sim[-1])
        sim.append(z)
        sim_supports.append(support)
    return ConjugateTrace(mapped, np.array(sim), mapped_supports, sim_supports)

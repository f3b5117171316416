"""Tiny instances on which the convergence hypotheses are verified exactly.

Gaussian matrices small enough for exact restricted isometry constants
almost never satisfy the step-size window, so the theory suites use
perturbed simplex frames (n = 16, m = 15, K = 2) whose low-order constants
stay well below one. Regularizer parameters are chosen so that the window
is nonempty for most draws; mu is put at the window midpoint.
"""
from functools import lru_cache

import numpy as np

from rhtp import AlgoConfig, PsiMap, Regularizer, exact_ric_table, run
from rhtp.analysis import compute_constants, required_orders
from rhtp.bench.instances import near_isometric_instance

N, K, PERTURBATION = 16, 2, 0.01


def verified_regularizers(n=N):
    return {
        "zero": Regularizer.zero(n),
        "q2": Regularizer.smooth_power(2.0, 1.0, 0.3, n),
        "q1.5": Regularizer.smooth_power(1.5, 2.0, 0.1, n),
        "q1": Regularizer.smooth_power(1.0, 4.0, 0.3, n),
        "q0.5": Regularizer.smooth_power(0.5, 3.0, 0.3, n),
    }


REGS = verified_regularizers()
PSI = {name: PsiMap(reg) for name, reg in REGS.items()}


def near_instance(seed, noise=0.0):
    return near_isometric_instance(N, K, noise, np.random.default_rng(seed), perturbation=PERTURBATION)


@lru_cache(maxsize=None)
def near_delta(seed):
    # the matrix is drawn before the signal and noise, so delta depends on the seed only
    return exact_ric_table(near_instance(seed).phi, set(required_orders(K, N)) | {3})


def midpoint_constants(delta, reg):
    """Constants at the midpoint of the admissible step window, or None if it is empty."""
    lo, hi = compute_constants(delta, reg, 0.5, K).mu_window
    if not lo < hi:
        return None
    return compute_constants(delta, reg, 0.5 * (lo + hi), K, delta_exact=True)


def verified_runs(seeds, noises=(0.0,), names=None):
    """Yield ``(seed, noise, name, inst, cfg, constants, trace)`` for every verified case."""
    for seed in seeds:
        delta = near_delta(seed)
        for noise in noises:
            inst = near_instance(seed, noise)
            for name in names or REGS:
                reg = REGS[name]
                const = midpoint_constants(delta, reg)
                if const is None:
                    continue
                cfg = AlgoConfig(mu=const.mu, K=K, reg=reg, max_iters=100)
                yield seed, noise, name, inst, cfg, const, run(inst, cfg)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    """Print and keep one PASS/FAIL line for the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok

"""One JSON document gathering every checker's verdict for a single run."""
from __future__ import annotations

import json
import math

import numpy as np

from ..algorithms import AlgoConfig, IterationTrace
from ..errors import ArgumentError, InapplicableError
from ..regularizers import PsiMap, Regularizer
from ..sensing import ProblemInstance, exact_ric_table
from .constants import compute_constants, required_orders
from .conjugacy import conjugate_trace
from .contraction import contraction_check
from .descent import descent_monitor
from .bounds import iterate_bounds_check
from .iterations import first_index_with_support, predict_iterations


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def analysis_report(
    trace: IterationTrace,
    inst: ProblemInstance,
    cfg: AlgoConfig,
    *,
    delta=None,
) -> dict:
    """Run every applicable checker over ``trace``.

    ``delta`` maps orders to RIC values; when omitted it is enumerated
    exactly from ``inst.phi``, which is only feasible for tiny matrices.
    Checkers whose hypotheses fail are skipped and listed under
    ``condition_flags`` rather than reported as violations.
    """
    reg = cfg.reg if cfg.reg is not None else Regularizer.zero(inst.n)
    psi_map = PsiMap(reg)
    exact = delta is None
    if delta is None:
        delta = exact_ric_table(inst.phi, required_orders(cfg.K, inst.n))
    violations = []
    flags = {"delta_exact": exact}
    constants = None
    try:
        constants = compute_constants(delta, reg, cfg.mu, cfg.K, delta_exact=exact)
        flags.update(constants.flags)
    except ArgumentError as exc:
        flags["constants_error"] = str(exc)

    desc = descent_monitor(trace, inst, psi_map, mu=cfg.mu, delta2K=delta.get(2 * cfg.K))
    flags["descent_condition"] = desc.condition_held
    if desc.condition_held:
        violations += [{"check": "descent", "k": k} for k in desc.violations]

    if cfg.algorithm == "rhtp" or cfg.algorithm == "htp":
        conj = conjugate_trace(trace, psi_map, inst, cfg)
        dev = conj.deviation
        violations += [
            {"check": "conjugacy", "k": int(k), "deviation": float(dev[k])}
            for k in np.flatnonzero(dev > 1e-8)
        ]

    predicted = None
    observed = None
    if inst.x_star is not None:
        z_star = psi_map.psi(inst.x_star)
        e_norm = 0.0 if inst.e is None else float(np.linalg.norm(inst.e))
        if constants is not None and constants.rho_valid and constants.descent_condition:
            rep = contraction_check(trace, z_star, constants, psi_map, e_norm=e_norm)
            violations += [{"check": "contraction", "k": k} for k in rep.violations]
            try:
                predicted = predict_iterations(
                    constants, psi_map.psi(trace.records[0].x), z_star, e_norm
                )
            except InapplicableError as exc:
                flags["prediction_error"] = str(exc)
        if all(s in delta for s in (cfg.K, 2 * cfg.K, 2 * cfg.K + 1)) and delta[2 * cfg.K + 1] < 1:
            bounds = iterate_bounds_check(trace, inst, reg, cfg.mu, delta, K=cfg.K)
            violations += [
                {"check": "iterate_bounds", "k": k, "i": i, "kind": kind}
                for k, i, kind, _, _ in bounds.violations
            ]
        first = first_index_with_support(trace, inst.true_support)
        observed = {
            "iterations": trace.iterations_used,
            "first_true_support": first,
            "status": trace.status,
        }
    doc = {
        "constants": None if constants is None else constants.to_json(),
        "condition_flags": flags,
        "violations": violations,
        "predicted_iters": predicted,
        "observed_iters": observed,
    }
    return _jsonable(doc)


def write_report(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")

import json
import math

import numpy as np
import pytest

from rhtp import (
    AlgoConfig,
    ArgumentError,
    InapplicableError,
    PreconditionError,
    ProblemInstance,
    PsiMap,
    Regularizer,
    run,
    validate,
)
from rhtp.analysis import (
    analysis_report,
    compute_constants,
    conjugate_trace,
    contraction_check,
    d_inequality_check,
    d_map,
    descent_condition,
    descent_monitor,
    first_index_with_support,
    global_E,
    inner_product_bound_check,
    iterate_bounds_check,
    predict_iterations,
    projection_bound_check,
    signal_dependent_bound,
    step_window,
    support_growth_condition,
    universal_bound,
    universal_constant,
    wielandt_check,
    wielandt_extremal_pair,
    write_report,
)
from rhtp.analysis.constants import kappa_3k, rho_3s
from rhtp.bench.instances import generate_instance

from .helpers import K, PSI, REGS, near_delta, near_instance, verified_runs

SQRT2 = math.sqrt(2.0)


def flat_delta(value, K=2):
    return {s: value for s in (1, 2, K, 2 * K, 2 * K + 1, 3 * K)}


# constants -------------------------------------------------------------------


def test_ideal_isometry_constants():
    c = compute_constants(flat_delta(0.0), Regularizer.zero(8), 1.0, 2)
    assert all(v == 0 for v in c.mu_prime.values())
    assert c.rho3K == 0
    for v in c.tau.values():
        assert v == pytest.approx(SQRT2 + 1, rel=1e-15)
    assert c.kappa3K == pytest.approx(SQRT2, rel=1e-15)
    assert kappa_3k(0.0, 0.0, SQRT2 + 1, 0.0) == pytest.approx(SQRT2, rel=1e-15)


def test_lower_step_bound_scales_with_l():
    lo0, _ = step_window(0.0, 0.0, 0.2, 0.3)
    lo1, _ = step_window(0.1, 0.0, 0.2, 0.3)
    assert lo1 == pytest.approx(0.9 * lo0, rel=1e-15)
    assert lo0 == pytest.approx((1 - 1 / math.sqrt(3)) / 0.7, rel=1e-15)


def test_zero_regularizer_descent_condition():
    for mu, d in [(0.5, 0.9), (0.99, 0.0), (0.8, 0.3), (0.7, 0.42)]:
        assert descent_condition(mu, d, 0.0, 0.0) == (mu * (1 + d) < 1)


def test_constants_formulas_against_direct_evaluation():
    delta = {1: 0.05, 2: 0.1, 3: 0.15, 4: 0.2, 5: 0.22, 6: 0.3}
    reg = Regularizer.smooth_power(2.0, 1.0, 0.3, 8)  # l = L = 0.6
    mu = 0.35
    c = compute_constants(delta, reg, mu, 2)
    l = 0.6
    mp = {s: 1 - mu * (1 - d) / (1 - l) for s, d in delta.items()}
    assert c.l == pytest.approx(l) and c.L == pytest.approx(l)
    for s in delta:
        assert c.mu_prime[s] == pytest.approx(mp[s], rel=1e-14)
        tau = SQRT2 * mu * math.sqrt(1 + delta[s]) / math.sqrt(1 - mp[s] ** 2) + math.sqrt(1 + delta[s]) / (1 - delta[s])
        assert c.tau[s] == pytest.approx(tau, rel=1e-14)
    rho = SQRT2 * mp[6] / math.sqrt(1 - mp[4] ** 2)
    assert c.rho3K == pytest.approx(rho, rel=1e-14)
    assert c.tau1 == pytest.approx(math.sqrt(2 * 1.1) * mu + c.tau[4] / (1 - rho), rel=1e-14)
    assert c.rho3K < 1
    assert c.mu_window[1] == pytest.approx(0.4**2 / (0.4 * 1.2), rel=1e-14)
    assert c.mu_prime[4] <= c.mu_prime[5] <= c.mu_prime[6]
    json.dumps(c.to_json())


def test_constants_from_matrix_are_exact():
    phi = near_instance(0).phi
    c = compute_constants(phi, Regularizer.zero(16), 0.5, 2)
    assert c.delta_exact and c.flags["delta_exact"]
    assert c.delta[6] == pytest.approx(near_delta(0)[6], rel=1e-14)


@pytest.mark.parametrize(
    "delta,mu",
    [({1: 0.1, 2: 0.1, 4: 1.2, 5: 0.2, 6: 0.2}, 0.5), (flat_delta(0.1), 0.0), ({2: 0.1, 4: 0.1}, 0.5)],
)
def test_constants_errors(delta, mu):
    with pytest.raises(ArgumentError):
        compute_constants(delta, Regularizer.zero(8), mu, 2)


def test_rho_below_one_and_mu_prime_threshold():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        a = rng.uniform(0, 0.95)
        b = rng.uniform(0, a)  # mu'_2K <= mu'_3K
        if a < 1 / math.sqrt(3):
            assert rho_3s(a, b) < 1
        # with equal orders the two conditions coincide
        assert (rho_3s(a, a) < 1) == (a < 1 / math.sqrt(3))


def test_window_flags():
    delta = near_delta(3)
    reg = REGS["zero"]
    lo, hi = compute_constants(delta, reg, 0.5, K).mu_window
    assert lo < hi
    inside = compute_constants(delta, reg, 0.5 * (lo + hi), K)
    assert inside.in_window and inside.rho_valid and inside.descent_condition
    outside = compute_constants(delta, reg, 0.5 * lo, K)
    assert not outside.in_window and not outside.flags["mu_in_window"]


# iteration predictors ----------------------------------------------------------


def test_universal_constant():
    assert universal_constant(0.1) == pytest.approx(math.log(400) / math.log(100), rel=1e-15)
    assert universal_constant(0.1) == pytest.approx(1.301, abs=5e-4)
    assert universal_constant(0.0) == 1.0
    with pytest.raises(InapplicableError):
        universal_constant(1.0)


def test_signal_bound_already_converged():
    const = compute_constants(near_delta(1), REGS["zero"], 0.9, K)
    z = np.zeros(16)
    z[[2, 9]] = [1.0, -0.5]
    assert signal_dependent_bound(const, z, z) == 0
    assert signal_dependent_bound(const, np.zeros(16), z, e_norm=1e6) is None


def test_predict_needs_contraction():
    const = compute_constants(flat_delta(0.9), REGS["zero"], 0.1, 2)
    assert not const.rho_valid
    with pytest.raises(InapplicableError):
        predict_iterations(const, np.zeros(8), np.ones(8))


def test_universal_bound_is_floor():
    const = compute_constants(flat_delta(0.0, K=3), REGS["zero"], 1.0, 3)
    assert universal_bound(const) == 3


def test_support_growth_condition():
    const = compute_constants(flat_delta(0.0), REGS["zero"], 1.0, 2)  # rho = 0
    z = np.array([0.0, 3.0, 0.0, -1.0])
    assert support_growth_condition(const, z, 0, 2, 1)
    assert not support_growth_condition(const, z, 0, 2, 1, e_norm=10.0)
    with pytest.raises(InapplicableError):
        support_growth_condition(const, z, 1, 2, 1)


# conjugacy ---------------------------------------------------------------------


def test_zero_regularizer_z_equals_x():
    inst = generate_instance(40, 20, 3, 0.0, np.random.default_rng(0))
    cfg = AlgoConfig(0.5, 3, algorithm="htp")
    tr = run(inst, cfg)
    ct = conjugate_trace(tr, PsiMap(Regularizer.zero(40)), inst, cfg)
    assert np.array_equal(ct.mapped, tr.iterates)
    assert ct.supports_agree


@pytest.mark.parametrize("q", [0.5, 1.0, 1.5, 2.0])
def test_conjugacy_small(q):
    reg = Regularizer.standard(q, 40)
    for seed in range(5):
        inst = generate_instance(40, 20, 3, 0.0, np.random.default_rng(seed))
        cfg = AlgoConfig(0.3, 3, reg=reg)
        ct = conjugate_trace(run(inst, cfg), PsiMap(reg), inst, cfg)
        assert ct.deviation.max() <= 1e-8
        assert ct.supports_agree
        for z, s in zip(ct.mapped, ct.mapped_supports):
            assert set(np.flatnonzero(z)) <= set(s.tolist())


# descent, contraction, bounds --------------------------------------------------


def test_descent_identity_and_no_violation():
    for *_, inst, cfg, const, tr in verified_runs(range(5)):
        rep = descent_monitor(tr, inst, PsiMap(cfg.reg), mu=cfg.mu, delta2K=const.delta[2 * K])
        assert rep.identity_error <= 1e-12
        assert rep.condition_held and rep.ok and rep.support_stable


def test_descent_reports_increase():
    inst = generate_instance(20, 10, 2, 0.0, np.random.default_rng(0))
    tr = run(inst, AlgoConfig(0.5, 2, algorithm="htp", max_iters=3))
    tr.records[2].x = tr.records[2].x * 0  # fake an iterate with larger residual
    rep = descent_monitor(tr, inst, PsiMap(Regularizer.zero(20)))
    assert 2 in rep.violations and not rep.ok


def test_contraction_verified_runs():
    for _, noise, _, inst, cfg, const, tr in verified_runs(range(6), noises=(0.0, 0.01)):
        pm = PsiMap(cfg.reg)
        rep = contraction_check(tr, pm.psi(inst.x_star), const, pm, e_norm=float(np.linalg.norm(inst.e)))
        assert rep.ok
        if noise == 0:
            np.testing.assert_allclose(rep.bounds, const.rho3K * rep.distances[:-1])


def test_contraction_flags_slow_sequence():
    seed = 2
    inst = near_instance(seed)
    const = compute_constants(near_delta(seed), REGS["zero"], 0.9, K)
    tr = run(inst, AlgoConfig(0.9, K, algorithm="htp", max_iters=1))
    tr.records[1].x = tr.records[0].x.copy()  # no progress at all
    rep = contraction_check(tr, inst.x_star, const, PSI["zero"])
    assert rep.violations == [1]


def test_iterate_bounds_verified_runs():
    for _, noise, _, inst, cfg, const, tr in verified_runs(range(6), noises=(0.0, 0.01)):
        rep = iterate_bounds_check(tr, inst, cfg.reg, cfg.mu, const.delta, K=K)
        assert rep.ok and rep.checked > 0
        assert np.all(rep.B_k <= rep.B) and np.all(rep.E <= rep.E_global + 1e-15)


def test_bounds_zero_regularizer_and_identity():
    x = np.zeros(6)
    x[[1, 4]] = [2.0, -1.0]
    inst = ProblemInstance(np.eye(6), x.copy(), 2, x_star=x, e=np.zeros(6))
    tr = run(inst, AlgoConfig(1.0, 2, algorithm="htp"))
    rep = iterate_bounds_check(tr, inst, Regularizer.zero(6), 1.0, flat_delta(0.0), K=2)
    assert rep.B == pytest.approx(np.linalg.norm(x))
    assert np.all(rep.C == 1.0)
    assert rep.ok
    assert np.all(global_E(inst, Regularizer.zero(6), 1.0, 0.0) == np.linalg.norm(x))


# inequality checkers -------------------------------------------------------------


def test_wielandt_extremal_pair_attains_equality():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 5))
    B = A @ A.T + np.eye(5)
    x, y = wielandt_extremal_pair(B)
    res = wielandt_check(B, x, y)
    assert res.ok and res.lhs == pytest.approx(res.rhs, rel=1e-10)


def test_wielandt_preconditions():
    B = np.diag([1.0, 2.0, 3.0])
    with pytest.raises(PreconditionError):
        wielandt_check(np.diag([1.0, 0.0, 2.0]), [1, 0, 0], [0, 1, 0])
    with pytest.raises(PreconditionError):
        wielandt_check(B, [1, 1, 0], [1, 0, 0])
    with pytest.raises(ArgumentError):
        wielandt_check(np.array([[1.0, 1.0], [0.0, 1.0]]), [1, 0], [0, 1])


def test_projection_checks_on_exact_delta():
    seed = 4
    phi = near_instance(seed).phi
    delta = near_delta(seed)
    rng = np.random.default_rng(1)
    for _ in range(200):
        idx = rng.permutation(16)
        S, Lam, i = np.sort(idx[:2]), np.sort(idx[2:4]), int(idx[4])
        x_lam = rng.standard_normal(2)
        assert projection_bound_check(phi, S, Lam, x_lam, delta[4]).ok
        assert inner_product_bound_check(phi, S, Lam, x_lam, i, delta[5]).ok
    with pytest.raises(PreconditionError):
        projection_bound_check(phi, [1, 2], [2, 3], [1.0, 1.0], 0.5)
    with pytest.raises(PreconditionError):
        inner_product_bound_check(phi, [1], [2], [1.0], 1, 0.5)


def test_d_map_reductions():
    phi = near_instance(0).phi
    pm = PSI["zero"]
    v = np.zeros(16)
    v[[3, 7]] = [1.0, -2.0]
    np.testing.assert_allclose(d_map(np.zeros(16), v, 0.4, phi, pm), v - 0.4 * phi.T @ (phi @ v), atol=1e-15)
    res = d_inequality_check(v, v, v, 0.4, phi, REGS["zero"], near_delta(0))
    assert res.inner.lhs == 0 and res.norm.lhs == 0 and res.ok


def test_d_inequality_random_cases():
    seed = 0
    phi = near_instance(seed).phi
    delta = near_delta(seed)
    rng = np.random.default_rng(7)
    E = 3.0
    for name, reg in REGS.items():
        for _ in range(100):
            u, v, w = (np.zeros(16) for _ in range(3))
            u[rng.choice(16, 2, replace=False)] = rng.uniform(-E, E, 2)
            v[rng.choice(16, 2, replace=False)] = rng.uniform(-E, E, 2)
            w[rng.choice(16, 2, replace=False)] = rng.standard_normal(2)
            T = np.count_nonzero((u != 0) | (v != 0) | (w != 0))
            val = validate(reg, E)
            rho = rng.uniform(0, (1 - val.L) ** 2 / ((1 - val.l) * (1 + delta[T])))
            res = d_inequality_check(u, v, w, rho, phi, reg, delta, E=E, psi_map=PSI[name])
            assert res.ok, (name, res)


def test_d_inequality_preconditions():
    phi = near_instance(0).phi
    delta = near_delta(0)
    v = np.zeros(16)
    v[0] = 5.0
    with pytest.raises(PreconditionError):
        d_inequality_check(np.zeros(16), v, v, 0.1, phi, REGS["q1"], delta, E=3.0)
    with pytest.raises(PreconditionError):
        d_inequality_check(np.zeros(16), v, v, 5.0, phi, REGS["q1"], delta)
    with pytest.raises(PreconditionError):
        d_inequality_check(np.zeros(16), v, v, 0.0, phi, REGS["q1"], delta)


# report --------------------------------------------------------------------------


def test_analysis_report(tmp_path):
    seed = 1
    inst = near_instance(seed)
    runs = [r for r in verified_runs([seed], names=["q1"])]
    assert runs
    *_, cfg, const, tr = runs[0]
    doc = analysis_report(tr, inst, cfg)
    assert set(doc) == {"constants", "condition_flags", "violations", "predicted_iters", "observed_iters"}
    assert doc["violations"] == []
    assert doc["condition_flags"]["delta_exact"] and doc["condition_flags"]["mu_in_window"]
    first = first_index_with_support(tr, inst.true_support)
    assert doc["observed_iters"]["first_true_support"] == first
    assert first <= doc["predicted_iters"]["universal"]
    path = tmp_path / "r.json"
    write_report(doc, path)
    assert json.loads(path.read_text()) == doc

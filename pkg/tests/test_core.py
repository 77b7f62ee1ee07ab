"""Closed-form identities of the equilibrium object itself.

Oracles here are independent of the solver: dealer regressions recomputed
from shock loadings, moment-based payoffs, and scaling laws.
"""

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hftkyle import ModelParams, classify_role, compute_outcomes, solve
from hftkyle.core import (
    INACTIVE,
    ROUND_TRIPPER,
    SMALL_IT,
    check_A_consistency,
    make_equilibrium,
    moment_outcomes,
    pricing_regression,
    shock_loadings,
)


_MEMO = {}


def _solved(theta1, theta_eps, Gamma, **kw):
    # cold multistart solves cost ~1 s, so reuse them across tests
    key = (theta1, theta_eps, Gamma, tuple(sorted(kw.items())))
    if key not in _MEMO:
        params = ModelParams(theta1, theta_eps, Gamma, **kw)
        report = solve(params)
        assert report.status == "Found"
        _MEMO[key] = (report.roots[0], params)
    return _MEMO[key]


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(-0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, -1e-9, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, -0.5)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, 1.0, sigma_v=0.0)


def test_dimensional_round_trip():
    p = ModelParams.from_dimensional(sigma_1=0.7, sigma_eps=0.3, gamma=0.2,
                                     sigma_v=2.0, sigma_2=0.5)
    assert_allclose(p.sigma_1, 0.7, rtol=1e-15)
    assert_allclose(p.sigma_eps, 0.3, rtol=1e-15)
    assert_allclose(p.gamma, 0.2, rtol=1e-15)
    assert_allclose(p.theta1, (0.7 / 0.5) ** 2, rtol=1e-15)


def test_pricing_regression_matches_equilibrium_impacts():
    # the dealer impact coefficients must equal the projection coefficients
    # recomputed from the shock loadings (two independent code paths)
    for t1, te, G in [(1.0, 1.0, 1.0), (0.1, 0.5, 0.0), (1.0, 1e-4, 20.0),
                      (0.5, 3.0, 0.3)]:
        eq, params = _solved(t1, te, G)
        L1, L21, L22 = pricing_regression(eq, params)
        assert_allclose(L1, eq.Lambda1, rtol=1e-9, atol=1e-12)
        assert_allclose(L21, eq.Lambda21, rtol=1e-9, atol=1e-12)
        assert_allclose(L22, eq.Lambda22, rtol=1e-9, atol=1e-12)


def test_moment_outcomes_match_closed_forms():
    eq, params = _solved(1.0, 1.0, 1.0)
    mo = moment_outcomes(eq, params)
    out = compute_outcomes(eq, params)
    # closed forms hold in this regime: slow trader's profit is A/2, the
    # time-2 pricing error is half the value variance, and noise losses
    # line up with the impact coefficients
    assert_allclose(out.pi_IT, 0.5 * eq.A, rtol=1e-12)
    assert_allclose(out.err_p2, 0.5, rtol=1e-12)
    assert_allclose(out.loss_NT1, eq.Lambda1 * params.theta1, rtol=1e-12)
    assert_allclose(out.loss_NT2, eq.Lambda22, rtol=1e-12)
    for name in ("pi_IT", "pi_HFT", "pi_HFT_holding", "pi_HFT_impact",
                 "penalty", "err_p1", "err_p2", "loss_NT1", "loss_NT2"):
        assert_allclose(mo[name], getattr(out, name), rtol=1e-9, atol=1e-12,
                        err_msg=name)


def test_hft_profit_decomposition():
    for t1, te, G in [(1.0, 1.0, 1.0), (0.1, 2.0, 0.1), (1.0, 0.2, 8.0)]:
        eq, params = _solved(t1, te, G)
        out = compute_outcomes(eq, params)
        assert_allclose(out.pi_HFT, out.pi_HFT_holding + out.pi_HFT_impact,
                        rtol=1e-10)


def test_traders_gain_what_noise_loses():
    # dealers break even on average, so aggregate trading profit must equal
    # the aggregate noise-trader loss
    rng = np.random.default_rng(7)
    n_checked = 0
    for _ in range(8):
        t1 = rng.uniform(0.05, 2.0)
        te = rng.uniform(0.0, 4.0)
        G = rng.uniform(0.0, 5.0)
        report = solve(ModelParams(t1, te, G))
        if report.status != "Found":
            continue
        out = compute_outcomes(report.roots[0], ModelParams(t1, te, G))
        assert_allclose(out.pi_IT + out.pi_HFT, out.loss_NT1 + out.loss_NT2,
                        rtol=1e-8, err_msg=f"({t1}, {te}, {G})")
        n_checked += 1
    assert n_checked >= 6


def test_outcomes_scale_with_volatilities():
    base_eq, base_params = _solved(1.0, 1.0, 1.0)
    eq, params = _solved(1.0, 1.0, 1.0, sigma_v=2.0, sigma_2=0.5)
    # normalized coefficients are dimensionless
    assert_allclose(eq.A, base_eq.A, rtol=1e-10)
    assert_allclose(eq.Lambda22, base_eq.Lambda22, rtol=1e-10)
    out, base = compute_outcomes(eq, params), compute_outcomes(base_eq, base_params)
    money = params.sigma_2 * params.sigma_v  # profit unit
    assert_allclose(out.pi_IT, base.pi_IT * money, rtol=1e-10)
    assert_allclose(out.pi_HFT, base.pi_HFT * money, rtol=1e-10)
    assert_allclose(out.loss_NT1, base.loss_NT1 * money, rtol=1e-10)
    assert_allclose(out.err_p2, base.err_p2 * params.sigma_v ** 2, rtol=1e-10)


def test_shock_loadings_price_martingale():
    # p1 and p2 are conditional expectations, so the final pricing residual
    # must be uncorrelated with both order-flow observations
    eq, params = _solved(0.5, 0.7, 0.4)
    loads = shock_loadings(eq, params)
    var = loads["cov"]
    resid2 = loads["v_m_p2"]
    assert_allclose(np.sum(resid2 * loads["y1"] * var), 0.0, atol=1e-12)
    assert_allclose(np.sum(resid2 * loads["y2"] * var), 0.0, atol=1e-12)
    # time-1 residual against time-1 flow as well
    assert_allclose(np.sum(loads["v_m_p1"] * loads["y1"] * var), 0.0,
                    atol=1e-12)


def test_role_classification_directions():
    eq, _ = _solved(1.0, 1e-4, 0.0)
    role = classify_role(eq)
    assert role.variant == SMALL_IT
    assert role.dir1 > 0 and role.dir2 > 0

    eq, _ = _solved(1.0, 1e-4, 20.0)
    role = classify_role(eq)
    assert role.variant == ROUND_TRIPPER
    assert role.dir1 > 0 and role.dir2 < 0

    # a dead-band equilibrium with no first-period trade is inactive
    quiet = dataclasses.replace(eq, beta1=1e-14)
    assert classify_role(quiet).variant == INACTIVE


def test_A_consistency_detects_tampering():
    eq, params = _solved(1.0, 1.0, 1.0)
    assert abs(check_A_consistency(eq, params)) < 1e-10
    bad = make_equilibrium(eq.Lambda22, eq.A * 1.05, eq.beta1, params)
    assert abs(check_A_consistency(bad, params)) > 1e-3

"""Two-asset extension: joint anticipation and the one-sided spillover.

Decoupling at zero correlation gives a machine-precision oracle (each
asset must reproduce the single-asset solution); the correlated baseline
is pinned by frozen fixed points.
"""

import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hftkyle import ModelParams, solve
from hftkyle.errors import PDViolation
from hftkyle.multiasset import (
    FixedPointConfig,
    MultiParams,
    baseline_full_params,
    baseline_spillover_params,
    classify_multi_roles,
    multi_moment_objectives,
    simulate_multi,
    solve_multi_full,
    solve_multi_spillover,
)

EYE = np.eye(2)


def _decoupled_params(sv=0.019, s1=0.6, s2=1.0, seps=0.2, g=0.1):
    return MultiParams(p0=(0.0, 0.0),
                       Sigma_v=sv ** 2 * EYE,
                       Sigma_eps=seps ** 2 * EYE,
                       Sigma_1=s1 ** 2 * EYE,
                       Sigma_2=s2 ** 2 * EYE,
                       gamma_mat=g * EYE)


def test_params_validation():
    good = dict(p0=(0.0, 0.0), Sigma_v=EYE, Sigma_eps=EYE, Sigma_1=EYE,
                Sigma_2=EYE, gamma_mat=0.1 * EYE)
    with pytest.raises(ValueError):
        MultiParams(**{**good, "Sigma_v": np.array([[1.0, 1.0], [1.0, 1.0]])})
    with pytest.raises(ValueError):
        MultiParams(**{**good, "Sigma_eps": np.array([[1.0, 0.2], [0.2, 1.0]])})
    with pytest.raises(ValueError):
        MultiParams(**{**good, "gamma_mat": np.array([[0.1, 1.0], [1.0, 0.1]])})
    with pytest.raises(ValueError):
        MultiParams(**{**good, "p0": (1.0, 2.0, 3.0)})


def test_baseline_calibrations():
    mp = baseline_spillover_params(0.3)
    assert_allclose(mp.rho, 0.8, rtol=1e-12)
    assert_allclose(mp.gamma_mat, [[0.3, 0.075], [0.075, 0.3]], rtol=1e-12)
    assert_allclose(mp.p0, [1.0, 1.0])
    full = baseline_full_params(0.3)
    assert_allclose(full.Sigma_v, mp.Sigma_v, rtol=1e-12)


def test_full_variant_decouples_at_zero_correlation():
    mp = _decoupled_params()
    eq = solve_multi_full(mp)
    # each asset should match its own single-asset equilibrium exactly
    for j in range(2):
        single = ModelParams(theta1=0.36, theta_eps=0.04,
                             Gamma=0.1 * 1.0 / 0.019,
                             sigma_v=0.019, sigma_2=1.0)
        root = solve(single).roots[0]
        assert_allclose(eq.beta1[j, j], root.beta1, rtol=1e-9)
        assert_allclose(eq.lambda22[j, j],
                        root.Lambda22 * single.sigma_v / single.sigma_2,
                        rtol=1e-9)
        assert_allclose(eq.alpha[j, j],
                        root.A * single.sigma_2 / single.sigma_v, rtol=1e-9)
    # and the cross blocks vanish
    off = np.abs(eq.beta1 - np.diag(np.diag(eq.beta1))).max()
    assert off < 1e-10


def test_spillover_zero_correlation_silences_second_asset():
    mp = baseline_spillover_params(0.2)
    flat = MultiParams(p0=mp.p0, Sigma_v=np.diag(np.diag(mp.Sigma_v)),
                       Sigma_eps=mp.Sigma_eps, Sigma_1=mp.Sigma_1,
                       Sigma_2=mp.Sigma_2,
                       gamma_mat=np.diag(np.diag(mp.gamma_mat)))
    eq = solve_multi_spillover(flat)
    assert abs(eq.beta1[1]) < 1e-12
    assert abs(eq.beta21[1]) < 1e-12
    assert np.abs(eq.beta22[1]).max() < 1e-12
    # the unwind rule still applies on the silent asset
    assert_allclose(eq.beta23[1, 1], -1.0, atol=1e-9)


FROZEN_SPILLOVER = {
    # gamma1 -> (alpha, beta1_1, beta1_2)
    0.0: (15.412627248918026, 1.049887702878743, 0.621509002921002),
    0.25: (59.88568297179925, 0.3152054727779742, 0.00591876159497866),
    0.5: (60.52393739792188, 0.3116391392752165, 0.00292856348198831),
}


def test_spillover_baseline_frozen_points():
    for g1, (a, b11, b12) in FROZEN_SPILLOVER.items():
        eq = solve_multi_spillover(baseline_spillover_params(g1))
        assert_allclose(eq.alpha, a, rtol=1e-8, err_msg=f"g1={g1}")
        assert_allclose(eq.beta1, [b11, b12], rtol=1e-7, err_msg=f"g1={g1}")
        assert eq.fixed_point_residual < 1e-10
        assert all(eq.pd_ok)


def test_spillover_roles_transition_with_penalty():
    first = solve_multi_spillover(baseline_spillover_params(0.0))
    r1, r2 = classify_multi_roles(first, 0.8)
    assert (r1.variant, r2.variant) == ("SmallIT", "SmallIT")
    later = solve_multi_spillover(baseline_spillover_params(0.25))
    r1, r2 = classify_multi_roles(later, 0.8)
    assert (r1.variant, r2.variant) == ("RoundTripper", "SmallIT")


def test_full_baseline_frozen_point():
    eq = solve_multi_full(baseline_full_params(0.2))
    assert_allclose(np.diag(eq.alpha), [88.39935356529784, 84.50543903378633],
                    rtol=1e-8)
    assert_allclose(np.diag(eq.beta1), [0.316495820914144, 0.29306741380431883],
                    rtol=1e-8)
    assert_allclose(eq.lambda22.ravel(),
                    [0.00687912901121156, 0.00322676834858747,
                     0.00352222244359252, 0.00660382786691311], rtol=1e-7)
    assert eq.fixed_point_residual < 1e-10
    assert all(eq.pd_ok)


def test_full_variant_label_swap_symmetry():
    # permuting the assets must permute the equilibrium
    mp = baseline_full_params(0.2)
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    swapped = MultiParams(p0=mp.p0[::-1].copy(),
                          Sigma_v=P @ mp.Sigma_v @ P,
                          Sigma_eps=P @ mp.Sigma_eps @ P,
                          Sigma_1=P @ mp.Sigma_1 @ P,
                          Sigma_2=P @ mp.Sigma_2 @ P,
                          gamma_mat=P @ mp.gamma_mat @ P)
    a = solve_multi_full(mp)
    b = solve_multi_full(swapped)
    assert_allclose(P @ b.beta1 @ P, a.beta1, rtol=1e-8, atol=1e-12)
    assert_allclose(P @ b.lambda22 @ P, a.lambda22, rtol=1e-8, atol=1e-12)
    assert_allclose(P @ b.alpha @ P, a.alpha, rtol=1e-8, atol=1e-10)


def test_warm_start_hits_same_fixed_point():
    mp = baseline_spillover_params(0.3)
    cold = solve_multi_spillover(mp)
    warm = solve_multi_spillover(baseline_spillover_params(0.35), start=cold)
    ref = solve_multi_spillover(baseline_spillover_params(0.35))
    assert_allclose(warm.beta1, ref.beta1, rtol=1e-8)
    assert_allclose(warm.alpha, ref.alpha, rtol=1e-8)


def _with_rho(mp, rho, diag_penalty=False):
    sv = mp.Sigma_v.copy()
    sv[0, 1] = sv[1, 0] = rho * np.sqrt(sv[0, 0] * sv[1, 1])
    g = np.diag(np.diag(mp.gamma_mat)) if diag_penalty else mp.gamma_mat
    return MultiParams(p0=mp.p0, Sigma_v=sv, Sigma_eps=mp.Sigma_eps,
                       Sigma_1=mp.Sigma_1, Sigma_2=mp.Sigma_2, gamma_mat=g)


def test_spillover_coupling_is_linear_in_correlation():
    # with an own-asset penalty only, the cross-asset position scales like
    # the value correlation near zero
    mp = baseline_spillover_params(0.2)
    mags = {rho: solve_multi_spillover(_with_rho(mp, rho, diag_penalty=True)).beta1[1]
            for rho in (0.05, 0.1)}
    assert mags[0.1] > mags[0.05] > 0
    assert 1.9 < mags[0.1] / mags[0.05] < 2.1
    # the cross-inventory penalty breaks that scaling: asset 2 is then used
    # to hedge asset-1 inventory even when the values are nearly unrelated
    hedged = solve_multi_spillover(_with_rho(mp, 0.01))
    assert abs(hedged.beta1[1]) > 0.01


def test_objectives_match_simulation():
    mp = baseline_full_params(0.1)
    eq = solve_multi_full(mp)
    target = multi_moment_objectives(eq, mp)
    sim = simulate_multi(eq, mp, n_paths=200_000, seed=4)
    for name in ("pi_IT", "pi_HFT", "penalty"):
        mean, se = sim[name]
        assert abs(mean - target[name]) < 4.0 * se, name


def test_config_rejects_bad_tolerances():
    with pytest.raises(ValueError):
        FixedPointConfig(tol=0.0)
    with pytest.raises(ValueError):
        FixedPointConfig(max_iters=0)

"""Root finding for the reduced three-equation system.

Frozen reference values were produced by long-double Newton refinement and
cross-checked against the moment identities; they pin the solver output so
regressions show up as numeric drift rather than silent root swaps.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hftkyle import ModelParams, solve
from hftkyle.solver import (
    STATUS_FOUND,
    STATUS_NO_ROOT,
    STATUS_ONLY_SOC_VIOLATING,
    SolverConfig,
    default_multistart,
    newton_system,
    residual_map,
    system_polynomials,
)

# (theta1, theta_eps, Gamma) -> A, cross-checked in earlier validation runs
FROZEN_A = {
    (1.0, 1.0, 1.0): 1.0914832360788993,
    (1e-6, 1.0, 1.0): 0.9210987235097702,
    (1.0, 1e-4, 0.0): 0.017678486377443497,
}


def test_reference_roots_are_stable():
    for (t1, te, G), a_ref in FROZEN_A.items():
        report = solve(ModelParams(t1, te, G))
        assert report.status == STATUS_FOUND
        assert_allclose(report.roots[0].A, a_ref, rtol=1e-10,
                        err_msg=f"({t1}, {te}, {G})")


def test_residuals_vanish_at_roots():
    params = ModelParams(1.0, 1.0, 1.0)
    eq = solve(params).roots[0]
    res = residual_map(eq.Lambda22, eq.A, eq.beta1, params)
    assert np.max(np.abs(res)) < 1e-12
    # long-double polish should leave essentially nothing behind
    assert eq.residual_norm < 1e-14
    polys = system_polynomials(eq.Lambda22, eq.A, eq.beta1, params)
    assert np.max(np.abs(polys)) < 1e-9


def test_solver_is_deterministic():
    params = ModelParams(0.7, 0.9, 2.5)
    r1 = solve(params)
    r2 = solve(params)
    assert r1.status == r2.status
    assert len(r1.roots) == len(r2.roots)
    for a, b in zip(r1.roots, r2.roots):
        assert a == b


def test_roots_are_deduplicated():
    cfg = SolverConfig()
    report = solve(ModelParams(1.0, 1.0, 1.0), cfg)
    xs = np.array([[e.Lambda22, e.A, e.beta1] for e in report.roots])
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            assert np.linalg.norm(xs[i] - xs[j]) > cfg.dedup_tol


def test_soc_flags_on_accepted_roots():
    report = solve(ModelParams(1.0, 1.0, 1.0))
    assert report.converged_starts > 0
    assert report.rejected >= 0
    for eq in report.roots:
        assert eq.soc_ok == (True, True, True)


def test_no_signal_point_yields_no_valid_root():
    # with a perfect signal and no penalty there is no equilibrium of this
    # form: whatever stationary points exist fail the validity screens
    report = solve(ModelParams(0.1, 0.0, 0.0))
    assert report.status in (STATUS_NO_ROOT, STATUS_ONLY_SOC_VIOLATING)
    assert report.roots == []


def test_artifact_roots_filtered_at_zero_signal_noise():
    # sigma_eps = 0 makes algebraic spurious branches appear; the solver
    # must not return any root whose implied order-aggressiveness drifts
    report = solve(ModelParams(1.0, 0.0, 0.5))
    from hftkyle.core import check_A_consistency

    for eq in report.roots:
        assert abs(check_A_consistency(eq, ModelParams(1.0, 0.0, 0.5))) < 1e-8


def test_multistart_covers_scaling_regimes():
    starts = default_multistart(ModelParams(1.0, 1e-4, 0.0))
    assert len(starts) >= 8
    arr = np.asarray(starts, dtype=float)
    assert arr.shape[1] == 3
    # the sharp-signal regime needs seeds with large first-period trading
    assert np.max(arr[:, 2]) > 10.0


def test_newton_on_quadratic_converges():
    x, fnorm = newton_system(lambda x: np.array([x[0] ** 2 - 4.0, x[1] - 1.0]),
                             np.array([3.0, 0.0]))
    assert_allclose(x, [2.0, 1.0], rtol=1e-12)
    assert fnorm < 1e-12


def test_newton_returns_none_on_hopeless_system():
    out = newton_system(lambda x: np.array([x[0] ** 2 + 1.0]),  # no real root
                        np.array([1.0]))
    assert out is None


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(residual_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(damping=0.0)
